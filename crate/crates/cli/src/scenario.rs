//! Generator specs and stream loading.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use dynmis::generate::{
    gen_arboricity_stream_shaped, gen_bipartite_adversary, gen_random_stream, ArboricityShape,
    ARBORICITY_STREAM_P_INSERT,
};
use dynmis::{parse_stream, UpdateStream};

use crate::Failure;

/// A generator kind plus its `key=value` parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub kind: String,
    pub params: BTreeMap<String, String>,
}

impl GenSpec {
    /// `kind` with parameters given as separate `key=value` words.
    pub fn from_words(kind: &str, words: &[String]) -> Result<Self, Failure> {
        let mut params = BTreeMap::new();
        for w in words {
            let (k, v) = w
                .split_once('=')
                .ok_or_else(|| Failure::usage(format!("expected key=value, got `{w}`")))?;
            if params.insert(k.to_string(), v.to_string()).is_some() {
                return Err(Failure::usage(format!("parameter `{k}` given twice")));
            }
        }
        Ok(Self { kind: kind.to_string(), params })
    }

    /// Compact form `kind:key=value,key=value`.
    pub fn parse(text: &str) -> Result<Self, Failure> {
        let (kind, rest) = text.split_once(':').unwrap_or((text, ""));
        let words: Vec<String> = rest
            .split(',')
            .filter(|w| !w.is_empty())
            .map(str::to_string)
            .collect();
        Self::from_words(kind, &words)
    }

    pub fn generate(&self) -> Result<UpdateStream, Failure> {
        let mut p = Params { kind: &self.kind, left: self.params.clone() };
        let stream = match self.kind.as_str() {
            "random" => {
                let n = p.required("n")?;
                let steps = p.required("steps")?;
                let prob = p.optional("p", 0.5)?;
                let seed = p.optional("seed", 0)?;
                p.finish()?;
                gen_random_stream(n, steps, prob, seed)
            }
            "bipartite-adv" => {
                let s = p.required("s")?;
                let rounds = p.required("rounds")?;
                p.finish()?;
                gen_bipartite_adversary(s, rounds)
            }
            "arboricity" | "forest" => {
                let n = p.required("n")?;
                let lambda = p.required("lambda")?;
                let steps = p.required("steps")?;
                let shape = ArboricityShape {
                    p_insert: p.optional("p", ARBORICITY_STREAM_P_INSERT)?,
                    hubs: p.optional("hubs", 0)?,
                    hub_bias: p.optional("hub-bias", 0.0)?,
                };
                let seed = p.optional("seed", 0)?;
                p.finish()?;
                gen_arboricity_stream_shaped(n, lambda, steps, &shape, seed)
            }
            other => {
                return Err(Failure::usage(format!(
                    "unknown generator `{other}` (known: random, bipartite-adv, arboricity)"
                )))
            }
        };
        stream.map_err(|e| Failure::usage(format!("{}: {e}", self.kind)))
    }
}

struct Params<'a> {
    kind: &'a str,
    left: BTreeMap<String, String>,
}

impl Params<'_> {
    fn value<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, Failure> {
        match self.left.remove(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|_| {
                Failure::usage(format!("{}: bad value `{raw}` for `{key}`", self.kind))
            }),
        }
    }

    fn required<T: FromStr>(&mut self, key: &str) -> Result<T, Failure> {
        self.value(key)?
            .ok_or_else(|| Failure::usage(format!("{}: missing parameter `{key}`", self.kind)))
    }

    fn optional<T: FromStr>(&mut self, key: &str, default: T) -> Result<T, Failure> {
        Ok(self.value(key)?.unwrap_or(default))
    }

    fn finish(self) -> Result<(), Failure> {
        match self.left.keys().next() {
            None => Ok(()),
            Some(k) => Err(Failure::usage(format!("{}: unknown parameter `{k}`", self.kind))),
        }
    }
}

pub fn read_stream(path: &Path) -> Result<UpdateStream, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    parse_stream(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}
