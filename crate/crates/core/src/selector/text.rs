//! Prefix text form of expression trees, e.g. `(max (+ ES PT) (% W DD))`,
//! and the selector file format.

use super::tree::{Expr, Op, Terminal};
use super::{Provenance, Selector};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SelectorParseError {
    #[error("position {position}: unexpected end of input")]
    UnexpectedEnd { position: usize },
    #[error("position {position}: unexpected `{found}`")]
    Unexpected { position: usize, found: String },
    #[error("position {position}: unknown terminal `{name}`")]
    UnknownTerminal { position: usize, name: String },
    #[error("position {position}: unknown operator `{name}`")]
    UnknownOperator { position: usize, name: String },
    #[error("position {position}: operator `{op}` takes 2 arguments, found {found}")]
    Arity {
        position: usize,
        op: String,
        found: usize,
    },
    #[error("line {line}: {message}")]
    File { line: usize, message: String },
    #[error("no selector found")]
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
enum Token<'a> {
    Open,
    Close,
    Symbol(&'a str),
}

fn tokenize(text: &str) -> Vec<(usize, Token<'_>)> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' => {
                out.push((i, Token::Open));
                i += 1;
            }
            b')' => {
                out.push((i, Token::Close));
                i += 1;
            }
            c if c.is_ascii_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < bytes.len()
                    && !matches!(bytes[i], b'(' | b')')
                    && !bytes[i].is_ascii_whitespace()
                {
                    i += 1;
                }
                out.push((start, Token::Symbol(&text[start..i])));
            }
        }
    }
    out
}

struct Parser<'a> {
    tokens: Vec<(usize, Token<'a>)>,
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&(usize, Token<'a>)> {
        self.tokens.get(self.pos)
    }

    fn expr(&mut self) -> Result<Expr, SelectorParseError> {
        let Some((position, tok)) = self.tokens.get(self.pos).cloned() else {
            return Err(SelectorParseError::UnexpectedEnd { position: self.end });
        };
        self.pos += 1;
        match tok {
            Token::Symbol(name) => Terminal::from_name(name)
                .map(Expr::Terminal)
                .ok_or_else(|| SelectorParseError::UnknownTerminal {
                    position,
                    name: name.into(),
                }),
            Token::Close => Err(SelectorParseError::Unexpected {
                position,
                found: ")".into(),
            }),
            Token::Open => {
                let (op_pos, op_name) = match self.tokens.get(self.pos).cloned() {
                    Some((p, Token::Symbol(s))) => (p, s),
                    Some((p, _)) => {
                        return Err(SelectorParseError::Unexpected {
                            position: p,
                            found: "(".into(),
                        })
                    }
                    None => return Err(SelectorParseError::UnexpectedEnd { position: self.end }),
                };
                self.pos += 1;
                let op = Op::from_symbol(op_name).ok_or_else(|| {
                    SelectorParseError::UnknownOperator {
                        position: op_pos,
                        name: op_name.into(),
                    }
                })?;
                let mut args = Vec::new();
                loop {
                    match self.peek() {
                        Some((_, Token::Close)) => {
                            self.pos += 1;
                            break;
                        }
                        None => {
                            return Err(SelectorParseError::UnexpectedEnd { position: self.end })
                        }
                        _ => args.push(self.expr()?),
                    }
                }
                if args.len() != 2 {
                    return Err(SelectorParseError::Arity {
                        position,
                        op: op_name.into(),
                        found: args.len(),
                    });
                }
                let r = args.pop().unwrap();
                let l = args.pop().unwrap();
                Ok(Expr::op(op, l, r))
            }
        }
    }
}

pub fn parse_expr(text: &str) -> Result<Expr, SelectorParseError> {
    let mut parser = Parser {
        tokens: tokenize(text),
        pos: 0,
        end: text.len(),
    };
    let expr = parser.expr()?;
    if let Some((position, tok)) = parser.peek() {
        let found = match tok {
            Token::Open => "(".to_string(),
            Token::Close => ")".to_string(),
            Token::Symbol(s) => s.to_string(),
        };
        return Err(SelectorParseError::Unexpected {
            position: *position,
            found,
        });
    }
    Ok(expr)
}

pub fn parse_selector(text: &str) -> Result<Selector, SelectorParseError> {
    Ok(Selector::new(parse_expr(text)?))
}

pub fn format_selector(selector: &Selector) -> String {
    selector.root.to_string()
}

/// One `# fitness=<value> gen=<g> seed=<s>` header (when provenance is
/// known) followed by the expression, per selector.
pub fn format_selector_file(selectors: &[Selector]) -> String {
    let mut out = String::new();
    for s in selectors {
        if let Some(p) = &s.provenance {
            out.push_str(&format!(
                "# fitness={} gen={} seed={}\n",
                p.fitness, p.generation, p.seed
            ));
        }
        out.push_str(&format_selector(s));
        out.push('\n');
    }
    out
}

/// Reads every selector in a file; a provenance header applies to the
/// expression that follows it.
pub fn parse_selector_file(text: &str) -> Result<Vec<Selector>, SelectorParseError> {
    let mut out = Vec::new();
    let mut pending: Option<Provenance> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if comment.contains("fitness=") {
                pending =
                    Some(
                        parse_header(comment).map_err(|message| SelectorParseError::File {
                            line: idx + 1,
                            message,
                        })?,
                    );
            }
            continue;
        }
        let expr = parse_expr(line).map_err(|e| SelectorParseError::File {
            line: idx + 1,
            message: e.to_string(),
        })?;
        out.push(Selector {
            root: expr,
            provenance: pending.take(),
        });
    }
    Ok(out)
}

fn parse_header(comment: &str) -> Result<Provenance, String> {
    let (mut fitness, mut generation, mut seed) = (None, None, None);
    for field in comment.split_whitespace() {
        let Some((key, value)) = field.split_once('=') else {
            continue;
        };
        match key {
            "fitness" => {
                fitness = Some(
                    value
                        .parse::<f64>()
                        .map_err(|_| format!("invalid fitness `{value}`"))?,
                )
            }
            "gen" => {
                generation = Some(
                    value
                        .parse::<usize>()
                        .map_err(|_| format!("invalid gen `{value}`"))?,
                )
            }
            "seed" => {
                seed = Some(
                    value
                        .parse::<u64>()
                        .map_err(|_| format!("invalid seed `{value}`"))?,
                )
            }
            _ => {}
        }
    }
    match (fitness, generation, seed) {
        (Some(fitness), Some(generation), Some(seed)) => Ok(Provenance {
            fitness,
            generation,
            seed,
        }),
        _ => Err("header needs fitness, gen and seed".into()),
    }
}
