//! File formats: channel environments, input traces, and program loading.
//!
//! A channel environment is a key-value document with one section per
//! channel:
//!
//! ```text
//! [cH1]
//! direction = in
//! level = H
//! default = F
//! ```
//!
//! An input trace is one `CHANNEL=VALUE` line per item (`cH1=T`, `cL2=2`);
//! a JSON array of `{"channel": ..., "value": ...}` objects is accepted as
//! an alternative.

use crate::lang::ast::Program;
use crate::lang::channel::{Channel, ChannelEnv, ChannelEnvError, Direction, Level};
use crate::lang::lexer::SyntaxError;
use crate::lang::parser::parse_program;
use crate::lang::queue::{IoItem, IoQueue};
use crate::lang::value::Value;

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Channel(#[from] ChannelEnvError),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("JSON trace: {0}")]
    Json(#[from] serde_json::Error),
}

fn format_err(line: usize, message: impl Into<String>) -> LoadError {
    LoadError::Format {
        line,
        message: message.into(),
    }
}

/// Strip a `#` comment and surrounding whitespace.
fn clean(line: &str) -> &str {
    let line = match line.find('#') {
        Some(idx) => &line[..idx],
        None => line,
    };
    line.trim()
}

/// Parse a channel environment document.
pub fn parse_channel_env(text: &str) -> Result<ChannelEnv, LoadError> {
    struct Partial {
        line: usize,
        name: String,
        direction: Option<Direction>,
        level: Option<Level>,
        default: Option<Value>,
    }

    fn finish(p: Partial) -> Result<Channel, LoadError> {
        let missing =
            |field: &str| format_err(p.line, format!("channel `{}` missing `{field}`", p.name));
        Ok(Channel {
            direction: p.direction.ok_or_else(|| missing("direction"))?,
            level: p.level.ok_or_else(|| missing("level"))?,
            default_value: p.default.ok_or_else(|| missing("default"))?,
            name: p.name,
        })
    }

    let mut channels = Vec::new();
    let mut current: Option<Partial> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = clean(raw);
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            if let Some(done) = current.take() {
                channels.push(finish(done)?);
            }
            current = Some(Partial {
                line: line_no,
                name: name.trim().to_string(),
                direction: None,
                level: None,
                default: None,
            });
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format_err(
                line_no,
                format!("expected `key = value`, found `{line}`"),
            ));
        };
        let (key, value) = (key.trim(), value.trim());
        let Some(p) = current.as_mut() else {
            return Err(format_err(line_no, "key before any [channel] section"));
        };
        match key {
            "direction" => {
                p.direction = Some(match value {
                    "in" => Direction::In,
                    "out" => Direction::Out,
                    other => {
                        return Err(format_err(
                            line_no,
                            format!("direction must be `in` or `out`, found `{other}`"),
                        ))
                    }
                })
            }
            "level" => {
                p.level = Some(match value {
                    "H" => Level::H,
                    "L" => Level::L,
                    other => {
                        return Err(format_err(
                            line_no,
                            format!("level must be `H` or `L`, found `{other}`"),
                        ))
                    }
                })
            }
            "default" => {
                p.default = Some(Value::parse_literal(value).ok_or_else(|| {
                    format_err(
                        line_no,
                        format!("default must be `T`, `F`, or an integer, found `{value}`"),
                    )
                })?)
            }
            other => return Err(format_err(line_no, format!("unknown key `{other}`"))),
        }
    }
    if let Some(done) = current.take() {
        channels.push(finish(done)?);
    }
    Ok(ChannelEnv::new(channels)?)
}

/// Render an environment back to the document form.
pub fn write_channel_env(env: &ChannelEnv) -> String {
    let mut out = String::new();
    for ch in env.iter() {
        out.push_str(&format!(
            "[{}]\ndirection = {}\nlevel = {}\ndefault = {}\n\n",
            ch.name, ch.direction, ch.level, ch.default_value
        ));
    }
    out
}

/// Parse an input trace. Items are validated against the environment:
/// declared, input-directed, and of the declared kind.
pub fn parse_input_trace(text: &str, env: &ChannelEnv) -> Result<IoQueue, LoadError> {
    let items: Vec<IoItem> = if text.trim_start().starts_with('[') {
        serde_json::from_str(text)?
    } else {
        let mut items = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = clean(raw);
            if line.is_empty() {
                continue;
            }
            let Some((channel, value)) = line.split_once('=') else {
                return Err(format_err(
                    line_no,
                    format!("expected `CHANNEL=VALUE`, found `{line}`"),
                ));
            };
            let value = Value::parse_literal(value.trim()).ok_or_else(|| {
                format_err(
                    line_no,
                    format!("bad value in `{line}` (use T, F, or an integer)"),
                )
            })?;
            items.push(IoItem::new(channel.trim().to_string(), value));
        }
        items
    };
    for item in &items {
        env.check_use(&item.channel, Direction::In)?;
        env.check_kind(&item.channel, item.value)?;
    }
    Ok(IoQueue::from_items(items))
}

pub fn write_input_trace(queue: &IoQueue) -> String {
    let mut out = String::new();
    for item in queue.iter() {
        out.push_str(&format!("{}={}\n", item.channel, item.value));
    }
    out
}

/// Parse a program and check its channel uses against the environment.
pub fn load_program(text: &str, env: &ChannelEnv) -> Result<Program, LoadError> {
    let prg = parse_program(text)?;
    prg.check_channels(env)?;
    Ok(prg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ENV: &str = "\
# two inputs, one output
[cH1]
direction = in
level = H
default = F

[cL2]
direction = in
level = L
default = 0

[cL3]
direction = out
level = L
default = 0
";

    #[test]
    fn channel_env_round_trip() {
        let env = parse_channel_env(ENV).unwrap();
        assert_eq!(env.iter().count(), 3);
        assert_eq!(env.level("cH1"), Some(Level::H));
        assert_eq!(env.default_value("cL2"), Some(Value::Int(0)));
        let again = parse_channel_env(&write_channel_env(&env)).unwrap();
        assert_eq!(env, again);
    }

    #[test]
    fn trace_text_and_json_agree() {
        let env = parse_channel_env(ENV).unwrap();
        let from_text = parse_input_trace("cH1=T\ncL2=2\n", &env).unwrap();
        let from_json = parse_input_trace(
            r#"[{"channel":"cH1","value":true},{"channel":"cL2","value":2}]"#,
            &env,
        )
        .unwrap();
        assert_eq!(from_text, from_json);
        let again = parse_input_trace(&write_input_trace(&from_text), &env).unwrap();
        assert_eq!(from_text, again);
    }

    #[test]
    fn trace_validation() {
        let env = parse_channel_env(ENV).unwrap();
        assert!(parse_input_trace("cX=1\n", &env).is_err());
        assert!(
            parse_input_trace("cL3=1\n", &env).is_err(),
            "output channel"
        );
        assert!(parse_input_trace("cH1=3\n", &env).is_err(), "kind mismatch");
    }

    #[test]
    fn program_channel_check() {
        let env = parse_channel_env(ENV).unwrap();
        assert!(load_program("input x from cH1; output x to cL3", &env).is_ok());
        assert!(load_program("input x from cL3", &env).is_err());
        assert!(load_program("output 1 to cMissing", &env).is_err());
    }
}
