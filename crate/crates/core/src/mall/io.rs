//! Text format for mall instances.
//!
//! ```text
//! mall-instance <areas> <locations-per-area> <types>
//! size-rent <small> <medium> <large>
//! size-limits <small> <medium> <large>
//! synergy <bonus>
//! type <t> groups <g...|-> bounds <min> <ideal> <max> peak <rent> fixed <per area> attract <per area>
//! ```
//!
//! Types and groups are zero-based; `-` marks a type without groups.

use std::fmt::Write as _;

use super::{CountBounds, MallInstance, MallTables};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub fn write_mall_instance<F: Scalar>(inst: &MallInstance<F>) -> String {
    let tables = inst.tables();
    let join = |values: &mut dyn Iterator<Item = String>| values.collect::<Vec<_>>().join(" ");
    let mut out = String::new();
    let _ = writeln!(out, "mall-instance {} {} {}", tables.areas, tables.per_area, tables.groups.len());
    let _ = writeln!(out, "size-rent {}", join(&mut tables.size_rent.iter().map(|v| v.to_string())));
    let _ = writeln!(out, "size-limits {}", join(&mut tables.size_limits.iter().map(|v| v.to_string())));
    let _ = writeln!(out, "synergy {}", tables.synergy);
    for t in 0..tables.groups.len() {
        let mask = tables.groups[t];
        let groups = if mask == 0 {
            "-".to_string()
        } else {
            join(&mut (0..64).filter(|g| mask >> g & 1 == 1).map(|g: u32| g.to_string()))
        };
        let b = tables.bounds[t];
        let _ = writeln!(
            out,
            "type {t} groups {groups} bounds {} {} {} peak {} fixed {} attract {}",
            b.min,
            b.ideal,
            b.max,
            tables.count_peak[t],
            join(&mut tables.fixed_rent[t].iter().map(|v| v.to_string())),
            join(&mut (0..tables.areas).map(|a| tables.attract[a][t].to_string())),
        );
    }
    out
}

pub fn read_mall_instance<F: Scalar>(text: &str) -> Result<MallInstance<F>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(no, l)| (no + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let err = |line: usize, message: String| Error::Parse { line, message };
    let parse = |line: usize, word: Option<&str>| -> Result<String> {
        word.map(str::to_string).ok_or_else(|| err(line, "unexpected end of line".into()))
    };
    fn num<T: std::str::FromStr>(line: usize, word: &str) -> Result<T> {
        word.parse().map_err(|_| Error::Parse { line, message: format!("cannot parse `{word}`") })
    }

    let (no, header) = lines.next().ok_or_else(|| err(0, "empty file".into()))?;
    let words: Vec<&str> = header.split_whitespace().collect();
    if words.len() != 4 || words[0] != "mall-instance" {
        return Err(err(no, "expected `mall-instance <areas> <locations-per-area> <types>`".into()));
    }
    let areas: usize = num(no, words[1])?;
    let per_area: usize = num(no, words[2])?;
    let types: usize = num(no, words[3])?;

    let mut size_rent = None;
    let mut size_limits = None;
    let mut synergy = None;
    let mut groups = Vec::with_capacity(types);
    let mut bounds = Vec::with_capacity(types);
    let mut peaks = Vec::with_capacity(types);
    let mut fixed = Vec::with_capacity(types);
    let mut attract = vec![Vec::with_capacity(types); areas];

    for (no, line) in lines {
        let mut it = line.split_whitespace();
        let record = parse(no, it.next())?;
        let rest: Vec<&str> = it.collect();
        match record.as_str() {
            "size-rent" | "size-limits" => {
                if rest.len() != 3 {
                    return Err(err(no, format!("`{record}` needs three values")));
                }
                if record == "size-rent" {
                    size_rent = Some([num::<F>(no, rest[0])?, num(no, rest[1])?, num(no, rest[2])?]);
                } else {
                    size_limits = Some([num::<u32>(no, rest[0])?, num(no, rest[1])?, num(no, rest[2])?]);
                }
            }
            "synergy" => {
                if rest.len() != 1 {
                    return Err(err(no, "`synergy` needs one value".into()));
                }
                synergy = Some(num::<F>(no, rest[0])?);
            }
            "type" => {
                let t: usize = num(no, parse(no, rest.first().copied())?.as_str())?;
                if t != groups.len() {
                    return Err(err(no, format!("type {t} out of order")));
                }
                let pos = |key: &str| {
                    rest.iter().position(|w| *w == key).ok_or_else(|| err(no, format!("missing `{key}`")))
                };
                let (g, b, p, f, a) = (pos("groups")?, pos("bounds")?, pos("peak")?, pos("fixed")?, pos("attract")?);
                if !(g == 1 && g < b && b + 4 == p && p + 2 == f && f + 1 + areas == a && a + 1 + areas == rest.len()) {
                    return Err(err(no, "malformed type record".into()));
                }
                let mut mask = 0u64;
                for word in &rest[g + 1..b] {
                    if *word == "-" {
                        continue;
                    }
                    let bit: u32 = num(no, word)?;
                    if bit >= 64 {
                        return Err(err(no, format!("group {bit} exceeds 63")));
                    }
                    mask |= 1 << bit;
                }
                groups.push(mask);
                bounds.push(CountBounds { min: num(no, rest[b + 1])?, ideal: num(no, rest[b + 2])?, max: num(no, rest[b + 3])? });
                peaks.push(num::<F>(no, rest[p + 1])?);
                fixed.push(rest[f + 1..a].iter().map(|w| num::<F>(no, w)).collect::<Result<Vec<_>>>()?);
                for (area, w) in rest[a + 1..].iter().enumerate() {
                    attract[area].push(num::<F>(no, w)?);
                }
            }
            other => return Err(err(no, format!("unknown record `{other}`"))),
        }
    }
    if groups.len() != types {
        return Err(err(0, format!("header promises {types} types, file has {}", groups.len())));
    }
    MallInstance::new(MallTables {
        areas,
        per_area,
        groups,
        attract,
        fixed_rent: fixed,
        size_rent: size_rent.ok_or_else(|| err(0, "missing `size-rent`".into()))?,
        synergy: synergy.ok_or_else(|| err(0, "missing `synergy`".into()))?,
        bounds,
        count_peak: peaks,
        size_limits: size_limits.ok_or_else(|| err(0, "missing `size-limits`".into()))?,
    })
}
