//! Line-oriented text format for nurse instances.
//!
//! ```text
//! nurse-instance <n> <m> <p>
//! pattern <j> <D|N|B> <14 chars of 0/1, days then nights>
//! demand <k> <R_k1> ... <R_kp>          (k = 1..14)
//! nurse <i> grade <g> contract <D> <N> <B> feasible <count> <j...> costs <m values>
//! ```
//!
//! Nurse and pattern indices are zero-based, grades and periods one-based.
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;

use super::{Contract, NurseInstance, PatternKind, ShiftPattern, PERIODS};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub fn write_nurse_instance<F: Scalar>(inst: &NurseInstance<F>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "nurse-instance {} {} {}", inst.nurse_count(), inst.pattern_count(), inst.grade_count());
    for (j, pattern) in inst.patterns().iter().enumerate() {
        let bits: String = (0..PERIODS).map(|k| if pattern.covers(k) { '1' } else { '0' }).collect();
        let _ = writeln!(out, "pattern {j} {} {bits}", pattern.kind.code());
    }
    for (k, row) in inst.demand_rows().iter().enumerate() {
        let values: Vec<String> = row.iter().map(u32::to_string).collect();
        let _ = writeln!(out, "demand {} {}", k + 1, values.join(" "));
    }
    for i in 0..inst.nurse_count() {
        let c = inst.contract(i);
        let feasible: Vec<String> = inst.feasible_set(i).iter().map(usize::to_string).collect();
        let costs: Vec<String> = inst.pref_costs()[i].iter().map(|v| v.to_string()).collect();
        let _ = writeln!(
            out,
            "nurse {i} grade {} contract {} {} {} feasible {} {} costs {}",
            inst.grade_of(i) + 1,
            c.days,
            c.nights,
            c.both,
            feasible.len(),
            feasible.join(" "),
            costs.join(" ")
        );
    }
    out
}

struct Tokens<'a> {
    line: usize,
    iter: std::str::SplitWhitespace<'a>,
}

impl<'a> Tokens<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse { line: self.line, message: message.into() }
    }

    fn word(&mut self) -> Result<&'a str> {
        self.iter.next().ok_or_else(|| self.err("unexpected end of line"))
    }

    fn keyword(&mut self, expected: &str) -> Result<()> {
        let got = self.word()?;
        if got == expected {
            Ok(())
        } else {
            Err(self.err(format!("expected `{expected}`, found `{got}`")))
        }
    }

    fn parse<T: std::str::FromStr>(&mut self) -> Result<T> {
        let word = self.word()?;
        word.parse().map_err(|_| self.err(format!("cannot parse `{word}`")))
    }

    fn finish(&mut self) -> Result<()> {
        match self.iter.next() {
            None => Ok(()),
            Some(extra) => Err(self.err(format!("trailing token `{extra}`"))),
        }
    }
}

pub fn read_nurse_instance<F: Scalar>(text: &str) -> Result<NurseInstance<F>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(no, l)| (no + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (no, header) = lines.next().ok_or(Error::Parse { line: 0, message: "empty file".into() })?;
    let mut t = Tokens { line: no, iter: header.split_whitespace() };
    t.keyword("nurse-instance")?;
    let n: usize = t.parse()?;
    let m: usize = t.parse()?;
    let p: usize = t.parse()?;
    t.finish()?;

    let mut patterns = Vec::with_capacity(m);
    let mut demand = Vec::with_capacity(PERIODS);
    let mut grades = Vec::with_capacity(n);
    let mut contracts = Vec::with_capacity(n);
    let mut costs = Vec::with_capacity(n);
    let mut declared_feasible = Vec::with_capacity(n);

    for (no, line) in lines {
        let mut t = Tokens { line: no, iter: line.split_whitespace() };
        match t.word()? {
            "pattern" => {
                let j: usize = t.parse()?;
                if j != patterns.len() {
                    return Err(t.err(format!("pattern {j} out of order")));
                }
                let kind = t.word()?;
                let kind = kind
                    .chars()
                    .next()
                    .and_then(PatternKind::from_code)
                    .filter(|_| kind.len() == 1)
                    .ok_or_else(|| t.err(format!("unknown pattern kind `{kind}`")))?;
                let bits = t.word()?;
                if bits.len() != PERIODS || !bits.chars().all(|c| c == '0' || c == '1') {
                    return Err(t.err("pattern cover must be 14 binary digits"));
                }
                let cover = bits.chars().enumerate().fold(0u16, |acc, (k, c)| acc | u16::from(c == '1') << k);
                patterns.push(ShiftPattern::new(cover, kind).map_err(|e| t.err(e.to_string()))?);
                t.finish()?;
            }
            "demand" => {
                let k: usize = t.parse()?;
                if k != demand.len() + 1 {
                    return Err(t.err(format!("demand row {k} out of order")));
                }
                let row = (0..p).map(|_| t.parse()).collect::<Result<Vec<u32>>>()?;
                demand.push(row);
                t.finish()?;
            }
            "nurse" => {
                let i: usize = t.parse()?;
                if i != grades.len() {
                    return Err(t.err(format!("nurse {i} out of order")));
                }
                t.keyword("grade")?;
                let g: usize = t.parse()?;
                if g == 0 || g > p {
                    return Err(t.err(format!("grade {g} outside 1..={p}")));
                }
                grades.push(g - 1);
                t.keyword("contract")?;
                contracts.push(Contract { days: t.parse()?, nights: t.parse()?, both: t.parse()? });
                t.keyword("feasible")?;
                let count: usize = t.parse()?;
                let set = (0..count).map(|_| t.parse()).collect::<Result<Vec<usize>>>()?;
                declared_feasible.push((no, set));
                t.keyword("costs")?;
                let row = (0..m).map(|_| t.parse()).collect::<Result<Vec<F>>>()?;
                costs.push(row);
                t.finish()?;
            }
            other => return Err(t.err(format!("unknown record `{other}`"))),
        }
    }

    if patterns.len() != m || grades.len() != n || demand.len() != PERIODS {
        return Err(Error::Parse {
            line: 0,
            message: format!(
                "header promises {n} nurses, {m} patterns; file has {} nurses, {} patterns, {} demand rows",
                grades.len(),
                patterns.len(),
                demand.len()
            ),
        });
    }
    let inst = NurseInstance::new(patterns, grades, p, contracts, costs, demand)?;
    for (i, (line, set)) in declared_feasible.into_iter().enumerate() {
        if set != inst.feasible_set(i) {
            return Err(Error::Parse { line, message: format!("feasible set of nurse {i} disagrees with its contract") });
        }
    }
    Ok(inst)
}
