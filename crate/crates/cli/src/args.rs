//! Flat token-stream argument parsing: a subcommand, a `key=value` model
//! spec, then `--flag value` pairs. `@path` tokens expand to the file's
//! contents, one token per line, so long requests can live in a file. No
//! parsing dependencies by design.

use lqlab::error::Error;
use lqlab::inversion::InversionConfig;
use lqlab::mcsim::McConfig;
use lqlab::models::parse_model;
use lqlab::tail_heavy::RegimeSpec;
use lqlab::LevyModel;

/// One token and where it came from, for diagnostics.
#[derive(Debug, Clone)]
pub struct Token {
    pub text: String,
    /// `argument N` or `file:line`.
    pub origin: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Survival,
    Transform,
    Mgf,
    AsympHeavy,
    AsympLight,
    Simulate,
    Validate,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Survival => "survival",
            Command::Transform => "transform",
            Command::Mgf => "mgf",
            Command::AsympHeavy => "asymp-heavy",
            Command::AsympLight => "asymp-light",
            Command::Simulate => "simulate",
            Command::Validate => "validate",
        }
    }
}

/// Which computational route a `survival`/`mgf` request runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    Closed,
    Invert,
    Mc,
}

/// Which transform a `transform` request evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformChoice {
    Min,
    MinTail,
    Stationary,
    RunningMax,
}

/// A fully parsed request.
#[derive(Debug, Clone)]
pub struct RunRequest {
    pub command: Command,
    pub model: LevyModel,
    pub t: Vec<f64>,
    pub u: Vec<f64>,
    pub x: Vec<f64>,
    pub q: Vec<f64>,
    pub big_t: Vec<f64>,
    pub regime: Option<RegimeSpec>,
    pub method: Option<MethodChoice>,
    pub which: TransformChoice,
    pub mc: McConfig,
    pub inversion: InversionConfig,
    pub output: Option<String>,
}

fn perr(origin: &str, message: impl Into<String>) -> Error {
    Error::Parse { index: 0, offset: 0, message: format!("{origin}: {}", message.into()) }
}

/// Expand `@file` tokens (one token per line; blank lines and `#` comments
/// skipped) and tag every token with its origin.
pub fn expand_tokens(args: &[String]) -> Result<Vec<Token>, Error> {
    let mut out = Vec::new();
    for (i, a) in args.iter().enumerate() {
        if let Some(path) = a.strip_prefix('@') {
            let body = std::fs::read_to_string(path)
                .map_err(|e| perr(&format!("argument {}", i + 1), format!("cannot read {path}: {e}")))?;
            for (ln, line) in body.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                out.push(Token { text: line.to_string(), origin: format!("{path}:{}", ln + 1) });
            }
        } else {
            out.push(Token { text: a.clone(), origin: format!("argument {}", i + 1) });
        }
    }
    Ok(out)
}

fn parse_list(tok: &Token) -> Result<Vec<f64>, Error> {
    let vals: Result<Vec<f64>, _> = tok.text.split(',').map(str::trim).map(str::parse).collect();
    match vals {
        Ok(v) if !v.is_empty() && v.iter().all(|x| x.is_finite()) => Ok(v),
        _ => Err(perr(&tok.origin, format!("`{}` is not a comma-separated number list", tok.text))),
    }
}

fn parse_scalar<T: std::str::FromStr>(tok: &Token, what: &str) -> Result<T, Error> {
    tok.text
        .parse()
        .map_err(|_| perr(&tok.origin, format!("`{}` is not a valid {what}", tok.text)))
}

pub fn parse_request(tokens: &[Token]) -> Result<RunRequest, Error> {
    let mut it = tokens.iter().peekable();
    let cmd_tok = it
        .next()
        .ok_or_else(|| perr("argument 1", "missing command (survival|transform|mgf|asymp-heavy|asymp-light|simulate|validate)"))?;
    let command = match cmd_tok.text.as_str() {
        "survival" => Command::Survival,
        "transform" => Command::Transform,
        "mgf" => Command::Mgf,
        "asymp-heavy" => Command::AsympHeavy,
        "asymp-light" => Command::AsympLight,
        "simulate" => Command::Simulate,
        "validate" => Command::Validate,
        other => return Err(perr(&cmd_tok.origin, format!("unknown command `{other}`"))),
    };

    // model spec: every token up to the first `--flag`
    let mut model_spec = String::new();
    while let Some(tok) = it.peek() {
        if tok.text.starts_with("--") {
            break;
        }
        if !model_spec.is_empty() {
            model_spec.push(' ');
        }
        model_spec.push_str(&it.next().unwrap().text);
    }
    let model = parse_model(&model_spec)?;

    let mut req = RunRequest {
        command,
        model,
        t: Vec::new(),
        u: Vec::new(),
        x: Vec::new(),
        q: Vec::new(),
        big_t: Vec::new(),
        regime: None,
        method: None,
        which: TransformChoice::Min,
        mc: McConfig::default(),
        inversion: InversionConfig::default(),
        output: None,
    };
    let mut regime_name: Option<String> = None;
    let mut regime_a: Option<f64> = None;

    while let Some(flag) = it.next() {
        let mut value = || {
            it.next()
                .ok_or_else(|| perr(&flag.origin, format!("flag {} needs a value", flag.text)))
        };
        match flag.text.as_str() {
            "--t" => req.t = parse_list(value()?)?,
            "--u" => req.u = parse_list(value()?)?,
            "--x" => req.x = parse_list(value()?)?,
            "--q" => req.q = parse_list(value()?)?,
            "--T" => req.big_t = parse_list(value()?)?,
            "--regime" => regime_name = Some(value()?.text.clone()),
            "--A" => regime_a = Some(parse_scalar(value()?, "number")?),
            "--method" => {
                let v = value()?;
                req.method = Some(match v.text.as_str() {
                    "closed" => MethodChoice::Closed,
                    "invert" => MethodChoice::Invert,
                    "mc" => MethodChoice::Mc,
                    other => {
                        return Err(perr(&v.origin, format!("unknown method `{other}` (closed|invert|mc)")))
                    }
                });
            }
            "--which" => {
                let v = value()?;
                req.which = match v.text.as_str() {
                    "min" => TransformChoice::Min,
                    "min-tail" => TransformChoice::MinTail,
                    "stationary" => TransformChoice::Stationary,
                    "running-max" => TransformChoice::RunningMax,
                    other => {
                        return Err(perr(
                            &v.origin,
                            format!("unknown transform `{other}` (min|min-tail|stationary|running-max)"),
                        ))
                    }
                };
            }
            "--paths" => req.mc.paths = parse_scalar(value()?, "path count")?,
            "--dt" => req.mc.dt = parse_scalar(value()?, "number")?,
            "--seed" => req.mc.seed = parse_scalar(value()?, "seed")?,
            "--workers" => req.mc.workers = parse_scalar(value()?, "worker count")?,
            "--bridge" => {
                let v = value()?;
                req.mc.bridge_correction = match v.text.as_str() {
                    "on" => true,
                    "off" => false,
                    other => return Err(perr(&v.origin, format!("--bridge takes on|off, got `{other}`"))),
                };
            }
            "--burn-in" => req.mc.stable_burn_in = parse_scalar(value()?, "number")?,
            "--terms" => {
                let terms = parse_scalar(value()?, "term count")?;
                req.inversion = InversionConfig::new(terms)?;
            }
            "--output" => req.output = Some(value()?.text.clone()),
            other => return Err(perr(&flag.origin, format!("unknown flag `{other}`"))),
        }
    }

    if let Some(name) = regime_name {
        req.regime = Some(match name.as_str() {
            "t-small" => RegimeSpec::TSmall,
            "t-large" => RegimeSpec::TLarge,
            "proportional" => {
                let a = regime_a.ok_or_else(|| {
                    perr("flags", "--regime proportional needs --A")
                })?;
                RegimeSpec::Proportional { a }
            }
            other => {
                return Err(perr(
                    "flags",
                    format!("unknown regime `{other}` (t-small|proportional|t-large)"),
                ))
            }
        });
        req.regime.unwrap().validate()?;
    } else if regime_a.is_some() {
        return Err(perr("flags", "--A is only meaningful with --regime proportional"));
    }

    // worker override from the environment
    if let Ok(v) = std::env::var("LQLAB_THREADS") {
        req.mc.workers = v
            .parse()
            .map_err(|_| perr("LQLAB_THREADS", format!("`{v}` is not a worker count")))?;
    }

    validate_request(&req)?;
    Ok(req)
}

fn validate_request(req: &RunRequest) -> Result<(), Error> {
    let need = |cond: bool, msg: &str| -> Result<(), Error> {
        if cond {
            Ok(())
        } else {
            Err(perr("request", msg))
        }
    };
    match req.command {
        Command::Survival => {
            need(!req.t.is_empty(), "survival needs --t")?;
            need(!req.u.is_empty(), "survival needs --u")?;
            if req.method == Some(MethodChoice::Closed)
                && req.model != (LevyModel::BrownianDrift { sigma: 1.0 })
            {
                return Err(perr(
                    "request",
                    "--method closed is exact only for kind=brownian sigma=1 \
                     (rescale other volatilities: P{M(t)>u} = P_std{M(t/s^2) > u/s^2})",
                ));
            }
        }
        Command::Transform => {
            need(!req.x.is_empty(), "transform needs --x")?;
            if req.which != TransformChoice::Stationary {
                need(!req.q.is_empty(), "transform needs --q")?;
            }
        }
        Command::Mgf => {
            need(!req.x.is_empty(), "mgf needs --x")?;
            need(!req.t.is_empty(), "mgf needs --t")?;
        }
        Command::AsympHeavy | Command::AsympLight => match req.regime {
            None => {
                need(!req.u.is_empty(), "the two-term form needs --u")?;
                need(!req.big_t.is_empty(), "the two-term form needs --T")?;
            }
            Some(RegimeSpec::TSmall) => {
                need(!req.u.is_empty(), "regime t-small takes the level list --u")?;
            }
            Some(_) => {
                need(!req.big_t.is_empty(), "this regime takes the window list --T")?;
            }
        },
        Command::Simulate => {
            need(!req.t.is_empty(), "simulate needs --t")?;
            need(!req.u.is_empty() || !req.x.is_empty(), "simulate needs --u and/or --x")?;
        }
        Command::Validate => {
            if let LevyModel::BrownianDrift { sigma } = req.model {
                need(
                    sigma == 1.0,
                    "validate for Brownian input runs against the sigma=1 closed form; rescale first",
                )?;
            }
        }
    }
    Ok(())
}
