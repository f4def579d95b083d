//! Plain-text scenario files: one command per line, `#` comments.
//!
//! ```text
//! session --vars s,t --horizon (0,50)
//! diagnose --poly "X^2 - X - t" --start 1
//! expect /verdict DISTINGUISHED_UP_TO_HORIZON
//! ```
//!
//! `session` replaces the session flags for the lines after it; `expect`
//! compares a JSON pointer into the most recent report with a value (JSON,
//! or a bare string).

use serde::Serialize;
use serde_json::Value;

use crate::cli::{error_report, execute, parse_command, tag_command, Command};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Step {
    Session(Vec<String>),
    Run { line: String, words: Vec<String> },
    Expect { pointer: String, value: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Scenario {
    pub steps: Vec<Step>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Expectation {
    pub pointer: String,
    pub expected: Value,
    pub actual: Option<Value>,
    pub pass: bool,
}

#[derive(Clone, Debug, Default)]
pub struct ScenarioRun {
    pub reports: Vec<Value>,
    pub mismatches: usize,
    pub error: Option<Error>,
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let mut steps = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let words = shlex::split(line).ok_or_else(|| Error::Parse {
            position: i + 1,
            message: "unbalanced quotes".into(),
        })?;
        let step = match words[0].as_str() {
            "session" => Step::Session(words[1..].to_vec()),
            "expect" => {
                if words.len() != 3 || !words[1].starts_with('/') {
                    return Err(Error::Parse {
                        position: i + 1,
                        message: "expected `expect /json/pointer value`".into(),
                    });
                }
                Step::Expect {
                    pointer: words[1].clone(),
                    value: words[2].clone(),
                }
            }
            "scenario" => {
                return Err(Error::Parse {
                    position: i + 1,
                    message: "scenarios cannot nest".into(),
                })
            }
            _ => Step::Run {
                line: line.to_string(),
                words,
            },
        };
        steps.push(step);
    }
    Ok(Scenario { steps })
}

fn expected_value(text: &str) -> Value {
    serde_json::from_str(text).unwrap_or_else(|_| Value::String(text.to_string()))
}

/// Runs the steps in order under the initial session flags. The first error
/// stops the run and is appended as a structured error report.
pub fn run_scenario(scenario: &Scenario, initial_session: &[String]) -> ScenarioRun {
    let mut session = initial_session.to_vec();
    let mut run = ScenarioRun::default();
    for step in &scenario.steps {
        match step {
            Step::Session(args) => session = args.clone(),
            Step::Run { line, words } => {
                let result = parse_command(&session, words).and_then(|cli| {
                    if matches!(cli.command, Command::Scenario { .. }) {
                        return Err(Error::Session("scenarios cannot nest".into()));
                    }
                    execute(&cli)
                });
                match result {
                    Ok(out) => {
                        if !out.matched {
                            run.mismatches += 1;
                        }
                        run.reports.push(tag_command(out.report, line));
                    }
                    Err(e) => {
                        run.reports.push(tag_command(error_report(&e), line));
                        run.error = Some(e);
                        return run;
                    }
                }
            }
            Step::Expect { pointer, value } => {
                let expected = expected_value(value);
                let Some(last) = run.reports.last_mut() else {
                    run.error = Some(Error::Session("expect before any command".into()));
                    return run;
                };
                let actual = last.pointer(pointer).cloned();
                let pass = actual.as_ref() == Some(&expected);
                if !pass {
                    run.mismatches += 1;
                }
                let record = serde_json::to_value(Expectation {
                    pointer: pointer.clone(),
                    expected,
                    actual,
                    pass,
                })
                .expect("json");
                if let Value::Object(m) = last {
                    let list = m
                        .entry("expectations")
                        .or_insert_with(|| Value::Array(Vec::new()));
                    if let Value::Array(items) = list {
                        items.push(record);
                    }
                }
            }
        }
    }
    run
}
