//! Name resolution of parsed queries against the registered functions.

use serde::Serialize;
use thiserror::Error;

use super::parser::{parse_ast, Call, Literal, Pos, QueryAst, SourceExpr, SummarizerExpr, SyntaxError};
use crate::aggregation::{AggFunction, Buckets, CombineOp, Dimensions, ElementKind};
use crate::extraction::HopBound;
use crate::hubs::{AttrPredicate, Comparison, DegreeMode, MeasureMode};

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QueryError {
    #[error("syntax error at {}", .0)]
    Syntax(SyntaxError),
    #[error("{pos}: unknown {role} function `{name}`")]
    UnknownFunction { role: &'static str, name: String, pos: Pos },
    #[error("{pos}: `{name}` takes {expected} arguments, got {got}")]
    Arity {
        name: String,
        expected: &'static str,
        got: usize,
        pos: Pos,
    },
    #[error("{pos}: bad argument to `{name}`: {message}")]
    BadArgument { name: String, message: String, pos: Pos },
}

impl From<SyntaxError> for QueryError {
    fn from(e: SyntaxError) -> Self {
        Self::Syntax(e)
    }
}

/// π: the subgraph of interest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SourceSpec {
    /// The named graph as a whole.
    Whole { graph: String },
    /// Paths of at most `hops` between two anchors, given as vids or labels.
    Between { graph: String, a: String, b: String, hops: u32 },
}

/// σ: how hubs are chosen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SelectorSpec {
    TopDegree { k: usize, mode: DegreeMode },
    TopCloseness { k: usize, mode: MeasureMode },
    Attr(AttrPredicate),
}

impl SelectorSpec {
    /// Same selector with a different hub budget; attribute selectors have none.
    pub fn with_k(&self, k: usize) -> Self {
        match self {
            Self::TopDegree { mode, .. } => Self::TopDegree { k, mode: *mode },
            Self::TopCloseness { mode, .. } => Self::TopCloseness { k, mode: *mode },
            Self::Attr(p) => Self::Attr(p.clone()),
        }
    }
}

/// γ: membership of elements in hub-pair subgraphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Grouping {
    /// `x ⇝ v ⇝ y`.
    Betweenness,
    /// `x ⇝ v ⇝ y` within `hops`.
    Bounded { hops: u32, bound: HopBound },
}

/// τ: one requested summary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SummarySpec {
    Measure { name: String, function: AggFunction },
    VertexCount,
    RelationshipType,
    RelationshipStrength,
}

impl SummarySpec {
    pub fn name(&self) -> &str {
        match self {
            Self::Measure { name, .. } => name,
            Self::VertexCount => "vertexCount",
            Self::RelationshipType => "relationshipType",
            Self::RelationshipStrength => "relationshipStrength",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuerySpec {
    pub source: SourceSpec,
    pub selector: SelectorSpec,
    pub grouping: Grouping,
    pub summaries: Vec<SummarySpec>,
}

/// Parses and resolves a query.
pub fn parse(text: &str) -> Result<QuerySpec, QueryError> {
    resolve(&parse_ast(text)?)
}

pub fn resolve(ast: &QueryAst) -> Result<QuerySpec, QueryError> {
    let source = resolve_source(&ast.from)?;
    let selector = resolve_selector(&ast.select)?;
    let grouping = match &ast.group_by {
        Some(c) => resolve_grouping(c)?,
        None => Grouping::Betweenness,
    };
    let summaries = ast.summarize.iter().map(resolve_summary).collect::<Result<_, _>>()?;
    Ok(QuerySpec {
        source,
        selector,
        grouping,
        summaries,
    })
}

fn arity(c: &Call, ok: impl Fn(usize) -> bool, expected: &'static str) -> Result<(), QueryError> {
    if ok(c.args.len()) {
        Ok(())
    } else {
        Err(QueryError::Arity {
            name: c.name.clone(),
            expected,
            got: c.args.len(),
            pos: c.pos,
        })
    }
}

fn bad(c: &Call, message: impl Into<String>) -> QueryError {
    QueryError::BadArgument {
        name: c.name.clone(),
        message: message.into(),
        pos: c.pos,
    }
}

fn int_arg(c: &Call, lit: &Literal) -> Result<i64, QueryError> {
    match lit {
        Literal::Int(i) => Ok(*i),
        other => Err(bad(c, format!("expected an integer, found {other}"))),
    }
}

fn count_arg(c: &Call, lit: &Literal) -> Result<usize, QueryError> {
    let v = int_arg(c, lit)?;
    usize::try_from(v).map_err(|_| bad(c, format!("{v} is negative")))
}

fn text_arg(c: &Call, lit: &Literal) -> Result<String, QueryError> {
    match lit {
        Literal::Int(i) => Ok(i.to_string()),
        Literal::Ident(s) | Literal::Str(s) => Ok(s.clone()),
        Literal::Wildcard => Err(bad(c, "wildcard not allowed here")),
    }
}

fn word_arg(c: &Call, lit: &Literal) -> Result<String, QueryError> {
    Ok(text_arg(c, lit)?.to_ascii_lowercase())
}

fn resolve_source(src: &SourceExpr) -> Result<SourceSpec, QueryError> {
    let c = match src {
        SourceExpr::Named { name, .. } => return Ok(SourceSpec::Whole { graph: name.clone() }),
        SourceExpr::Call(c) => c,
    };
    match c.name.to_ascii_lowercase().as_str() {
        "wholegraph" => {
            arity(c, |n| n == 1, "1")?;
            Ok(SourceSpec::Whole {
                graph: text_arg(c, &c.args[0])?,
            })
        }
        "subgraph" => {
            arity(c, |n| n == 4, "4")?;
            let hops = u32::try_from(int_arg(c, &c.args[3])?).map_err(|_| bad(c, "hop budget out of range"))?;
            Ok(SourceSpec::Between {
                graph: text_arg(c, &c.args[0])?,
                a: text_arg(c, &c.args[1])?,
                b: text_arg(c, &c.args[2])?,
                hops,
            })
        }
        _ => Err(QueryError::UnknownFunction {
            role: "source",
            name: c.name.clone(),
            pos: c.pos,
        }),
    }
}

/// Hub budget and an optional trailing mode word, after an optional graph
/// argument: `f(k)`, `f(G, k)`, `f(G, k, mode)`.
fn budget_and_mode(c: &Call) -> Result<(usize, Option<String>), QueryError> {
    arity(c, |n| (1..=3).contains(&n), "1 to 3")?;
    match c.args.as_slice() {
        [k] => Ok((count_arg(c, k)?, None)),
        [Literal::Int(_), _] => Err(bad(c, "expected (graph, k)")),
        [_, k] => Ok((count_arg(c, k)?, None)),
        [_, k, mode] => Ok((count_arg(c, k)?, Some(word_arg(c, mode)?))),
        _ => unreachable!("arity checked"),
    }
}

fn resolve_selector(c: &Call) -> Result<SelectorSpec, QueryError> {
    match c.name.to_ascii_lowercase().as_str() {
        "topmaxdegreevertices" => {
            let (k, mode) = budget_and_mode(c)?;
            let mode = match mode.as_deref() {
                None | Some("total") => DegreeMode::Total,
                Some("out") => DegreeMode::Out,
                Some(m) => return Err(bad(c, format!("unknown degree mode `{m}`"))),
            };
            Ok(SelectorSpec::TopDegree { k, mode })
        }
        "topcloseness" => {
            let (k, mode) = budget_and_mode(c)?;
            let mode = match mode.as_deref() {
                None | Some("static") => MeasureMode::Static,
                Some("dynamic") => MeasureMode::Dynamic,
                Some(m) => return Err(bad(c, format!("unknown measure mode `{m}`"))),
            };
            Ok(SelectorSpec::TopCloseness { k, mode })
        }
        name @ ("attrequals" | "attrabove") => {
            arity(c, |n| n == 2 || n == 3, "2 or 3")?;
            let rest = &c.args[c.args.len() - 2..];
            Ok(SelectorSpec::Attr(AttrPredicate {
                attr: text_arg(c, &rest[0])?,
                cmp: if name == "attrequals" {
                    Comparison::Equals
                } else {
                    Comparison::Above
                },
                value: text_arg(c, &rest[1])?,
            }))
        }
        _ => Err(QueryError::UnknownFunction {
            role: "selection",
            name: c.name.clone(),
            pos: c.pos,
        }),
    }
}

fn resolve_grouping(c: &Call) -> Result<Grouping, QueryError> {
    match c.name.to_ascii_lowercase().as_str() {
        // the misspelling appears in published queries
        "betweenness" | "betweeness" => {
            arity(c, |n| n <= 2, "0 to 2")?;
            match c.args.as_slice() {
                [] => Ok(Grouping::Betweenness),
                [h, rest @ ..] => {
                    let hops = u32::try_from(int_arg(c, h)?).map_err(|_| bad(c, "hop budget out of range"))?;
                    if hops == 0 {
                        return Err(bad(c, "hop budget must be at least 1"));
                    }
                    let bound = match rest.first().map(|l| word_arg(c, l)).transpose()?.as_deref() {
                        None | Some("total") => HopBound::Total,
                        Some("per_side") => HopBound::PerSide,
                        Some(m) => return Err(bad(c, format!("unknown bound `{m}`"))),
                    };
                    Ok(Grouping::Bounded { hops, bound })
                }
            }
        }
        _ => Err(QueryError::UnknownFunction {
            role: "grouping",
            name: c.name.clone(),
            pos: c.pos,
        }),
    }
}

fn measure(name: &str, kind: ElementKind, dims: Dimensions, op: CombineOp) -> SummarySpec {
    SummarySpec::Measure {
        name: name.to_string(),
        function: AggFunction::new(name, kind, dims, op).expect("catalog functions are valid"),
    }
}

fn buckets_of(c: &Call) -> Result<Buckets, QueryError> {
    arity(c, |n| n == 0 || n == 2, "0 or 2")?;
    if c.args.is_empty() {
        return Ok(Buckets::default());
    }
    let (middle, high) = (int_arg(c, &c.args[0])?, int_arg(c, &c.args[1])?);
    if middle > high {
        return Err(bad(c, "Middle threshold above High threshold"));
    }
    Ok(Buckets { middle, high })
}

fn kind_arg(c: &Call, lit: Option<&Literal>) -> Result<ElementKind, QueryError> {
    match lit {
        None | Some(Literal::Wildcard) => Ok(ElementKind::Edge),
        Some(l) => match word_arg(c, l)?.as_str() {
            "e" | "edge" | "edges" => Ok(ElementKind::Edge),
            "v" | "vertex" | "vertices" => Ok(ElementKind::Vertex),
            other => Err(bad(c, format!("unknown element kind `{other}`"))),
        },
    }
}

fn resolve_summary(s: &SummarizerExpr) -> Result<SummarySpec, QueryError> {
    let c = &s.call;
    let lower = c.name.to_ascii_lowercase();
    if let Some((qualifier, by)) = &s.by {
        let op = CombineOp::parse(&lower).ok_or_else(|| QueryError::UnknownFunction {
            role: "summary",
            name: c.name.clone(),
            pos: c.pos,
        })?;
        arity(c, |n| n <= 1, "0 or 1")?;
        let kind = kind_arg(c, Some(&Literal::Ident(qualifier.clone())))?;
        if !by.name.eq_ignore_ascii_case("closeness") {
            return Err(QueryError::UnknownFunction {
                role: "dimension",
                name: by.name.clone(),
                pos: by.pos,
            });
        }
        if kind == ElementKind::Vertex {
            return Err(bad(by, "closeness buckets apply to edges"));
        }
        let dims = Dimensions::MeasureBucket(buckets_of(by)?);
        return Ok(measure("Closeness", kind, dims, op));
    }
    let spec = match lower.as_str() {
        "sumvmrbyvgrpegrp" => {
            arity(c, |n| n == 0, "0")?;
            SummarySpec::Measure {
                name: c.name.clone(),
                function: AggFunction::sum_v_mr(),
            }
        }
        "sumemrbyvgrpegrp" => {
            arity(c, |n| n == 0, "0")?;
            SummarySpec::Measure {
                name: c.name.clone(),
                function: AggFunction::sum_e_mr(),
            }
        }
        "count" => {
            arity(c, |n| n <= 1, "0 or 1")?;
            measure("COUNT", kind_arg(c, c.args.first())?, Dimensions::None, CombineOp::Count)
        }
        "closeness" => measure(
            "Closeness",
            ElementKind::Edge,
            Dimensions::MeasureBucket(buckets_of(c)?),
            CombineOp::Count,
        ),
        "vertexcount" => {
            arity(c, |n| n == 0, "0")?;
            SummarySpec::VertexCount
        }
        "relationshiptype" => {
            arity(c, |n| n == 0, "0")?;
            SummarySpec::RelationshipType
        }
        "relationshipstrength" => {
            arity(c, |n| n == 0, "0")?;
            SummarySpec::RelationshipStrength
        }
        "vertexagg" | "edgeagg" => {
            arity(c, |n| n == 1 || n == 2, "1 or 2")?;
            let op_word = word_arg(c, &c.args[0])?;
            let op = CombineOp::parse(&op_word).ok_or_else(|| bad(c, format!("unknown operator `{op_word}`")))?;
            let dims = match c.args.get(1) {
                None => Dimensions::None,
                Some(l) => {
                    let w = word_arg(c, l)?;
                    Dimensions::parse(&w).ok_or_else(|| bad(c, format!("unknown dimensions `{w}`")))?
                }
            };
            let kind = if lower == "vertexagg" {
                ElementKind::Vertex
            } else {
                ElementKind::Edge
            };
            let name = c.to_string();
            SummarySpec::Measure {
                function: AggFunction::new(name.clone(), kind, dims, op).map_err(|e| bad(c, e.to_string()))?,
                name,
            }
        }
        _ => {
            return Err(QueryError::UnknownFunction {
                role: "summary",
                name: c.name.clone(),
                pos: c.pos,
            })
        }
    };
    Ok(spec)
}
