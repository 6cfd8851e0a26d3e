//! Update-sequence files for the combinatorial problems.
//!
//! Every line starts with the problem name; one file holds one problem.
//!
//! ```text
//! setcover set <cost> <element>...      declare the next set
//! setcover insert|delete <element>
//! matching vertices <n>
//! matching edge <u> <v>                 initial edge
//! matching insert|delete <u> <v>
//! mst vertices <n>
//! mst edge <u> <v> <cost>               initial edge
//! mst insert <u> <v> <cost>
//! mst delete <u> <v>
//! loadbalance machines <m>
//! loadbalance insert <job> <machine>:<load>...
//! loadbalance delete <job>
//! ```

use crate::adapters::{Payload, ProblemKind, SetCoverInstance, UpdateEvent, UpdateOp};
use crate::error::{Error, Result};
use crate::stream::{content_lines, parse_pair};

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemInstance {
    SetCover {
        instance: SetCoverInstance,
        events: Vec<UpdateEvent>,
    },
    Matching {
        vertices: usize,
        initial: Vec<(usize, usize)>,
        events: Vec<UpdateEvent>,
    },
    Mst {
        vertices: usize,
        initial: Vec<(usize, usize, f64)>,
        events: Vec<UpdateEvent>,
    },
    LoadBalance {
        machines: usize,
        /// One past the largest job id.
        job_slots: usize,
        events: Vec<UpdateEvent>,
    },
}

impl ProblemInstance {
    pub fn kind(&self) -> ProblemKind {
        match self {
            Self::SetCover { .. } => ProblemKind::SetCover,
            Self::Matching { .. } => ProblemKind::Matching,
            Self::Mst { .. } => ProblemKind::Mst,
            Self::LoadBalance { .. } => ProblemKind::LoadBalance,
        }
    }

    pub fn events(&self) -> &[UpdateEvent] {
        match self {
            Self::SetCover { events, .. }
            | Self::Matching { events, .. }
            | Self::Mst { events, .. }
            | Self::LoadBalance { events, .. } => events,
        }
    }
}

struct Line<'a> {
    number: usize,
    tokens: Vec<&'a str>,
}

impl Line<'_> {
    fn arity(&self, n: usize) -> Result<()> {
        if self.tokens.len() != n {
            return Err(Error::parse(
                self.number,
                format!("expected {} arguments after {:?}", n - 2, self.tokens[1]),
            ));
        }
        Ok(())
    }

    fn usize(&self, k: usize) -> Result<usize> {
        let t = self.tokens.get(k).ok_or_else(|| Error::parse(self.number, "missing argument"))?;
        t.parse().map_err(|_| Error::parse(self.number, format!("expected an integer, got {t:?}")))
    }

    fn f64(&self, k: usize) -> Result<f64> {
        let t = self.tokens.get(k).ok_or_else(|| Error::parse(self.number, "missing argument"))?;
        t.parse().map_err(|_| Error::parse(self.number, format!("expected a number, got {t:?}")))
    }

    fn op(&self) -> Option<UpdateOp> {
        match self.tokens[1] {
            "insert" => Some(UpdateOp::Insert),
            "delete" => Some(UpdateOp::Delete),
            _ => None,
        }
    }

    fn unknown(&self) -> Error {
        Error::parse(self.number, format!("unknown {} record {:?}", self.tokens[0], self.tokens[1]))
    }
}

pub fn parse_updates(text: &str) -> Result<ProblemInstance> {
    let lines: Vec<Line> = content_lines(text)
        .map(|(number, content)| Line {
            number,
            tokens: content.split_whitespace().collect(),
        })
        .collect();
    let Some(first) = lines.first() else {
        return Err(Error::parse(1, "empty update file"));
    };
    let problem = first.tokens[0];
    for line in &lines {
        if line.tokens[0] != problem {
            return Err(Error::parse(line.number, format!("mixed problems {problem:?} and {:?}", line.tokens[0])));
        }
        if line.tokens.len() < 2 {
            return Err(Error::parse(line.number, "missing record type"));
        }
    }
    match problem {
        "setcover" => parse_setcover(&lines),
        "matching" | "mst" => parse_graph(&lines, problem == "mst"),
        "loadbalance" => parse_loadbalance(&lines),
        other => Err(Error::parse(first.number, format!("unknown problem {other:?}"))),
    }
}

fn parse_setcover(lines: &[Line]) -> Result<ProblemInstance> {
    let mut sets = Vec::new();
    let mut events = Vec::new();
    for line in lines {
        if line.tokens[1] == "set" {
            if !events.is_empty() {
                return Err(Error::parse(line.number, "sets must be declared before updates"));
            }
            let cost = line.f64(2)?;
            let elems = (3..line.tokens.len()).map(|k| line.usize(k)).collect::<Result<Vec<_>>>()?;
            sets.push((cost, elems));
            continue;
        }
        let op = line.op().ok_or_else(|| line.unknown())?;
        line.arity(3)?;
        events.push(UpdateEvent {
            problem: ProblemKind::SetCover,
            op,
            payload: Payload::Element(line.usize(2)?),
        });
    }
    let instance = SetCoverInstance::new(sets).map_err(|e| Error::parse(lines[0].number, e.to_string()))?;
    Ok(ProblemInstance::SetCover { instance, events })
}

fn parse_graph(lines: &[Line], weighted: bool) -> Result<ProblemInstance> {
    let mut vertices = None;
    let mut initial = Vec::new();
    let mut events = Vec::new();
    let problem = if weighted { ProblemKind::Mst } else { ProblemKind::Matching };
    for line in lines {
        match line.tokens[1] {
            "vertices" => {
                line.arity(3)?;
                if vertices.is_some() {
                    return Err(Error::parse(line.number, "vertex count given twice"));
                }
                vertices = Some(line.usize(2)?);
            }
            "edge" => {
                if !events.is_empty() {
                    return Err(Error::parse(line.number, "initial edges must precede updates"));
                }
                line.arity(if weighted { 5 } else { 4 })?;
                let cost = if weighted { line.f64(4)? } else { 1.0 };
                initial.push((line.usize(2)?, line.usize(3)?, cost));
            }
            _ => {
                let op = line.op().ok_or_else(|| line.unknown())?;
                let with_cost = weighted && op == UpdateOp::Insert;
                line.arity(if with_cost { 5 } else { 4 })?;
                let cost = if with_cost { Some(line.f64(4)?) } else { None };
                events.push(UpdateEvent {
                    problem,
                    op,
                    payload: Payload::Edge {
                        u: line.usize(2)?,
                        v: line.usize(3)?,
                        cost,
                    },
                });
            }
        }
    }
    let vertices = vertices.ok_or_else(|| Error::parse(lines[0].number, "missing vertex count"))?;
    Ok(if weighted {
        ProblemInstance::Mst {
            vertices,
            initial,
            events,
        }
    } else {
        ProblemInstance::Matching {
            vertices,
            initial: initial.into_iter().map(|(u, v, _)| (u, v)).collect(),
            events,
        }
    })
}

fn parse_loadbalance(lines: &[Line]) -> Result<ProblemInstance> {
    let mut machines = None;
    let mut events = Vec::new();
    let mut job_slots = 0;
    for line in lines {
        if line.tokens[1] == "machines" {
            line.arity(3)?;
            if machines.is_some() {
                return Err(Error::parse(line.number, "machine count given twice"));
            }
            machines = Some(line.usize(2)?);
            continue;
        }
        let op = line.op().ok_or_else(|| line.unknown())?;
        let id = line.usize(2)?;
        let loads = match op {
            UpdateOp::Insert => line.tokens[3..]
                .iter()
                .map(|t| parse_pair(line.number, t))
                .collect::<Result<Vec<_>>>()?,
            UpdateOp::Delete => {
                line.arity(3)?;
                Vec::new()
            }
        };
        job_slots = job_slots.max(id + 1);
        events.push(UpdateEvent {
            problem: ProblemKind::LoadBalance,
            op,
            payload: Payload::Job { id, loads },
        });
    }
    let machines = machines.ok_or_else(|| Error::parse(lines[0].number, "missing machine count"))?;
    Ok(ProblemInstance::LoadBalance {
        machines,
        job_slots,
        events,
    })
}
