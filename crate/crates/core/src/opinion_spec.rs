//! Serializable descriptions of opinions.
//!
//! Numbers are written as text (`"1/3"`, `"0.25"`) so that rational-mode
//! runs read them exactly. Plain numeric literals are also accepted and are
//! read through their shortest decimal form, so `0.7` means `7/10`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::history::{Alphabet, History};
use crate::measures::{halving_limit, Example1Surrogate, Opinion, OpinionKind, TailRule};
use crate::number::{parse_rational, Number};

/// A number kept in its textual form until the computation mode is known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumText(String);

impl NumText {
    pub fn new(text: impl Into<String>) -> Result<Self> {
        let text = text.into();
        parse_rational(&text)?;
        Ok(NumText(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn value<N: Number>(&self) -> Result<N> {
        N::parse_text(&self.0)
    }

    pub fn from_number<N: Number>(n: &N) -> Self {
        NumText(n.to_text())
    }
}

impl fmt::Display for NumText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for NumText {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for NumText {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct Visitor;
        impl serde::de::Visitor<'_> for Visitor {
            type Value = NumText;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a string such as \"1/3\"")
            }

            fn visit_str<E: serde::de::Error>(self, v: &str) -> std::result::Result<NumText, E> {
                NumText::new(v).map_err(E::custom)
            }

            fn visit_i64<E: serde::de::Error>(self, v: i64) -> std::result::Result<NumText, E> {
                Ok(NumText(v.to_string()))
            }

            fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<NumText, E> {
                Ok(NumText(v.to_string()))
            }

            fn visit_f64<E: serde::de::Error>(self, v: f64) -> std::result::Result<NumText, E> {
                if !v.is_finite() {
                    return Err(E::custom("non-finite number"));
                }
                Ok(NumText(format!("{v:?}")))
            }
        }
        deserializer.deserialize_any(Visitor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TailSpec {
    Constant { probs: Vec<NumText> },
    Geometric { symbol: u8, base: NumText },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub weight: NumText,
    pub opinion: OpinionSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OpinionSpec {
    Iid {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        probs: Vec<NumText>,
    },
    /// Binary IID with `p = Prob(symbol 1)`.
    Bernoulli {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        p: NumText,
    },
    TimeVarying {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        alphabet: usize,
        #[serde(default)]
        periods: Vec<Vec<NumText>>,
        #[serde(default, skip_serializing_if = "is_zero")]
        start: usize,
        tail: TailSpec,
    },
    Markov {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        initial: Vec<NumText>,
        transition: Vec<Vec<NumText>>,
    },
    Mixture {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        components: Vec<ComponentSpec>,
    },
    /// Explicit forecasts keyed by history string (`""` is the root).
    /// Without a tail the kernel continues as IID uniform.
    Table {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        alphabet: usize,
        depth: usize,
        entries: BTreeMap<String, Vec<NumText>>,
        #[serde(default, skip_serializing_if = "String::is_empty")]
        prefix: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail: Option<Box<OpinionSpec>>,
    },
    /// Truncated surrogate of the non-merging mixture, window `{n+1..n+k}`.
    Example1 {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        n: usize,
        k: usize,
    },
    /// The limit kernel with `Prob(X_k = 0) = 2^-k`.
    Example1Limit {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
}

fn is_zero(n: &usize) -> bool {
    *n == 0
}

fn numbers<N: Number>(v: &[NumText]) -> Result<Vec<N>> {
    v.iter().map(NumText::value).collect()
}

fn texts<N: Number>(v: &[N]) -> Vec<NumText> {
    v.iter().map(NumText::from_number).collect()
}

impl OpinionSpec {
    pub fn label(&self) -> Option<&str> {
        match self {
            OpinionSpec::Iid { label, .. }
            | OpinionSpec::Bernoulli { label, .. }
            | OpinionSpec::TimeVarying { label, .. }
            | OpinionSpec::Markov { label, .. }
            | OpinionSpec::Mixture { label, .. }
            | OpinionSpec::Table { label, .. }
            | OpinionSpec::Example1 { label, .. }
            | OpinionSpec::Example1Limit { label } => label.as_deref(),
        }
    }

    pub fn build<N: Number>(&self) -> Result<Opinion<N>> {
        let opinion = match self {
            OpinionSpec::Iid { probs, .. } => Opinion::iid("iid", numbers(probs)?)?,
            OpinionSpec::Bernoulli { p, .. } => Opinion::bern(p.value()?)?,
            OpinionSpec::TimeVarying { alphabet, periods, start, tail, .. } => {
                let alphabet = Alphabet::new(*alphabet)?;
                let periods = periods.iter().map(|p| numbers(p)).collect::<Result<Vec<_>>>()?;
                let tail = match tail {
                    TailSpec::Constant { probs } => TailRule::Constant(numbers(probs)?),
                    TailSpec::Geometric { symbol, base } => {
                        TailRule::Geometric { symbol: *symbol, base: base.value()? }
                    }
                };
                Opinion::time_varying("time-varying", alphabet, periods, tail)?.with_start(*start)
            }
            OpinionSpec::Markov { initial, transition, .. } => {
                let transition = transition.iter().map(|r| numbers(r)).collect::<Result<Vec<_>>>()?;
                Opinion::markov("markov", numbers(initial)?, transition)?
            }
            OpinionSpec::Mixture { components, .. } => {
                let components = components
                    .iter()
                    .map(|c| Ok((c.weight.value()?, c.opinion.build()?)))
                    .collect::<Result<Vec<_>>>()?;
                Opinion::mixture("mixture", components)?
            }
            OpinionSpec::Table { alphabet, depth, entries, prefix, tail, .. } => {
                let alphabet = Alphabet::new(*alphabet)?;
                let entries = entries
                    .iter()
                    .map(|(h, p)| Ok((History::parse(h, alphabet)?, numbers(p)?)))
                    .collect::<Result<BTreeMap<_, _>>>()?;
                let tail = match tail {
                    Some(t) => t.build()?,
                    None => Opinion::uniform(alphabet),
                };
                let table = Opinion::table("table", alphabet, *depth, entries, tail)?;
                table.condition(&History::parse(prefix, alphabet)?)?
            }
            OpinionSpec::Example1 { n, k, .. } => Example1Surrogate::new(*n, *k)?.opinion,
            OpinionSpec::Example1Limit { .. } => halving_limit(),
        };
        Ok(match self.label() {
            Some(label) => opinion.with_label(label),
            None => opinion,
        })
    }

    /// Describes an opinion; `build` on the result reproduces its forecasts.
    pub fn from_opinion<N: Number>(opinion: &Opinion<N>) -> OpinionSpec {
        let label = Some(opinion.label().to_string());
        match opinion.kind() {
            OpinionKind::Iid(p) => OpinionSpec::Iid { label, probs: texts(p) },
            OpinionKind::TimeVarying { periods, start, tail } => OpinionSpec::TimeVarying {
                label,
                alphabet: opinion.alphabet().size(),
                periods: periods.iter().map(|p| texts(p)).collect(),
                start: *start,
                tail: match tail {
                    TailRule::Constant(p) => TailSpec::Constant { probs: texts(p) },
                    TailRule::Geometric { symbol, base } => {
                        TailSpec::Geometric { symbol: *symbol, base: NumText::from_number(base) }
                    }
                },
            },
            OpinionKind::Markov { initial, transition } => OpinionSpec::Markov {
                label,
                initial: texts(initial),
                transition: transition.iter().map(|r| texts(r)).collect(),
            },
            OpinionKind::Mixture(components) => OpinionSpec::Mixture {
                label,
                components: components
                    .iter()
                    .map(|(w, c)| ComponentSpec { weight: NumText::from_number(w), opinion: Self::from_opinion(c) })
                    .collect(),
            },
            OpinionKind::Table { depth, entries, prefix, tail } => OpinionSpec::Table {
                label,
                alphabet: opinion.alphabet().size(),
                depth: *depth,
                entries: entries.iter().map(|(h, p)| (h.to_string(), texts(p))).collect(),
                prefix: prefix.to_string(),
                tail: Some(Box::new(Self::from_opinion(tail))),
            },
        }
    }
}

impl<N: Number> Opinion<N> {
    pub fn to_spec(&self) -> OpinionSpec {
        OpinionSpec::from_opinion(self)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_spec()).expect("opinion specs serialize")
    }
}

pub fn parse_opinion_json<N: Number>(text: &str) -> Result<Opinion<N>> {
    let spec: OpinionSpec =
        serde_json::from_str(text).map_err(|e| Error::Precondition(format!("bad opinion document: {e}")))?;
    spec.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::history::all_histories;
    use crate::number::{ratio, Exact};

    #[test]
    fn json_specs_build_exactly() {
        let mix: Opinion<Exact> = parse_opinion_json(
            r#"{"kind":"mixture","label":"m","components":[
                {"weight":"1/2","opinion":{"kind":"bernoulli","p":"1/3"}},
                {"weight":0.5,"opinion":{"kind":"bernoulli","p":"2/3"}}]}"#,
        )
        .unwrap();
        assert_eq!(mix.label(), "m");
        assert_eq!(mix.next_distribution(&"1".parse().unwrap()).unwrap()[1], ratio(5, 9));
        let b: Opinion<Exact> = parse_opinion_json(r#"{"kind":"bernoulli","p":0.7}"#).unwrap();
        assert_eq!(b.root_distribution(), vec![ratio(3, 10), ratio(7, 10)]);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(parse_opinion_json::<Exact>(r#"{"kind":"bernoulli","p":"1/2","q":1}"#).is_err());
        assert!(parse_opinion_json::<Exact>(r#"{"kind":"poisson","p":"1/2"}"#).is_err());
        assert!(parse_opinion_json::<Exact>(r#"{"kind":"bernoulli","p":"one half"}"#).is_err());
    }

    #[test]
    fn spec_round_trip_preserves_cylinders() {
        let corpus: Vec<Opinion<Exact>> = vec![
            Opinion::bern(ratio(1, 3)).unwrap(),
            Opinion::markov(
                "mk",
                vec![ratio(1, 2), ratio(1, 2)],
                vec![vec![ratio(7, 10), ratio(3, 10)], vec![ratio(2, 5), ratio(3, 5)]],
            )
            .unwrap(),
            Example1Surrogate::new(3, 2).unwrap().opinion,
            Example1Surrogate::new(3, 2).unwrap().opinion.condition(&"01".parse().unwrap()).unwrap(),
        ];
        for op in corpus {
            let json = serde_json::to_string(&op.to_spec()).unwrap();
            let back: Opinion<Exact> = parse_opinion_json(&json).unwrap();
            assert_eq!(back.label(), op.label());
            for h in all_histories(Alphabet::BINARY, 5) {
                assert_eq!(back.cylinder_prob(&h), op.cylinder_prob(&h));
            }
        }
    }
}
