//! `TRILAT 1` snapshot text format.
//!
//! ```text
//! TRILAT 1 ball 1 0 0
//! -1 0 oo
//! 0 -1 o.x
//! 1 -1 .o
//! ```
//!
//! The header names the region (`ball n cx cy`, `annulus n1 n2 cx cy`,
//! `lozenge k`, `explicit`). Each following line is one row, ascending in `y`:
//! the row's `y`, its first `x`, then one character per `x` — `.` vacant,
//! `o` occupied, `x` dead, `_` not in the region.

use super::{Configuration, SiteState};
use crate::error::{LabError, Result};
use crate::lattice::{Annulus, Ball, DenseRegion, Region, SiteCoord};
use std::collections::BTreeSet;
use std::fmt::Write as _;

fn header(region: &Region) -> String {
    match region {
        Region::Ball(b) => format!("TRILAT 1 ball {} {} {}", b.radius, b.center.x, b.center.y),
        Region::Annulus(a) => {
            format!("TRILAT 1 annulus {} {} {} {}", a.inner, a.outer, a.center.x, a.center.y)
        }
        Region::Lozenge(k) => format!("TRILAT 1 lozenge {k}"),
        Region::Explicit(_) => "TRILAT 1 explicit".to_string(),
    }
}

pub fn to_trilat(config: &Configuration) -> String {
    let dense = config.dense();
    let mut out = header(dense.region());
    out.push('\n');
    let sites = dense.sites();
    let mut i = 0;
    while i < sites.len() {
        let y = sites[i].y;
        let x0 = sites[i].x;
        let _ = write!(out, "{y} {x0} ");
        let mut x = x0;
        while i < sites.len() && sites[i].y == y {
            while x < sites[i].x {
                out.push('_');
                x += 1;
            }
            out.push(config.state(i as u32).as_char());
            x += 1;
            i += 1;
        }
        out.push('\n');
    }
    out
}

fn parse_err<T>(line: usize, msg: impl std::fmt::Display) -> Result<T> {
    Err(LabError::Parse(format!("line {line}: {msg}")))
}

fn nums<const K: usize>(parts: &[&str], line: usize) -> Result<[i64; K]> {
    if parts.len() != K {
        return parse_err(line, format!("expected {K} parameters, got {}", parts.len()));
    }
    let mut out = [0i64; K];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().map_err(|e| LabError::Parse(format!("line {line}: {e}")))?;
    }
    Ok(out)
}

fn to_u32(v: i64, line: usize) -> Result<u32> {
    u32::try_from(v).map_err(|_| LabError::Parse(format!("line {line}: {v} is not a valid size")))
}

pub fn from_trilat(text: &str) -> Result<Configuration> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let Some((_, head)) = lines.next() else {
        return parse_err(1, "empty input");
    };
    let parts: Vec<&str> = head.split_whitespace().collect();
    if parts.len() < 3 || parts[0] != "TRILAT" || parts[1] != "1" {
        return parse_err(1, "missing 'TRILAT 1' header");
    }
    let region = match parts[2] {
        "ball" => {
            let [n, cx, cy] = nums::<3>(&parts[3..], 1)?;
            Some(Region::Ball(Ball { radius: to_u32(n, 1)?, center: SiteCoord::new(cx as i32, cy as i32) }))
        }
        "annulus" => {
            let [n1, n2, cx, cy] = nums::<4>(&parts[3..], 1)?;
            let a = Annulus { inner: to_u32(n1, 1)?, outer: to_u32(n2, 1)?, center: SiteCoord::new(cx as i32, cy as i32) };
            a.validate()?;
            Some(Region::Annulus(a))
        }
        "lozenge" => {
            let [k] = nums::<1>(&parts[3..], 1)?;
            Some(Region::Lozenge(to_u32(k, 1)?))
        }
        "explicit" => None,
        other => return parse_err(1, format!("unknown region kind '{other}'")),
    };
    let mut sites = Vec::new();
    let mut states = Vec::new();
    let mut last_y: Option<i32> = None;
    for (ln, line) in lines {
        let ln = ln + 1;
        let mut it = line.split_whitespace();
        let (Some(y), Some(x0), Some(chars), None) = (it.next(), it.next(), it.next(), it.next()) else {
            return parse_err(ln, "expected '<y> <x0> <cells>'");
        };
        let y: i32 = y.parse().map_err(|e| LabError::Parse(format!("line {ln}: {e}")))?;
        let x0: i32 = x0.parse().map_err(|e| LabError::Parse(format!("line {ln}: {e}")))?;
        if last_y.is_some_and(|p| p >= y) {
            return parse_err(ln, "rows must be strictly ascending in y");
        }
        last_y = Some(y);
        for (k, c) in chars.chars().enumerate() {
            if c == '_' {
                continue;
            }
            let Some(s) = SiteState::from_char(c) else {
                return parse_err(ln, format!("bad cell '{c}'"));
            };
            sites.push(SiteCoord::new(x0 + k as i32, y));
            states.push(s);
        }
    }
    let region = match region {
        Some(r) => {
            if r.sites()? != sites {
                return Err(LabError::Parse("rows do not match the declared region".into()));
            }
            r
        }
        None => Region::Explicit(sites.iter().copied().collect::<BTreeSet<_>>()),
    };
    Configuration::new(DenseRegion::shared(region)?, states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::percolation::sample_bernoulli;
    use crate::rng::StreamKey;

    #[test]
    fn roundtrip_structured() {
        for region in [Region::ball(4), Region::annulus(1, 4).unwrap(), Region::lozenge(3)] {
            let d = DenseRegion::shared(region).unwrap();
            let mut c = sample_bernoulli(&d, 0.5, StreamKey(9)).unwrap();
            c.states_mut()[0] = SiteState::Dead;
            let text = to_trilat(&c);
            let back = from_trilat(&text).unwrap();
            assert_eq!(back, c);
            assert_eq!(to_trilat(&back), text);
        }
    }

    #[test]
    fn roundtrip_explicit_with_gaps() {
        let set: BTreeSet<_> = [(0, 0), (2, 0), (3, 0), (-1, 2)].into_iter().map(|(x, y)| SiteCoord::new(x, y)).collect();
        let d = DenseRegion::shared(Region::Explicit(set)).unwrap();
        let c = Configuration::new(d, vec![SiteState::Occupied, SiteState::Vacant, SiteState::Dead, SiteState::Occupied]).unwrap();
        let text = to_trilat(&c);
        assert!(text.contains("0 0 o_.x"));
        assert_eq!(from_trilat(&text).unwrap(), c);
    }

    #[test]
    fn rejects_garbage() {
        assert!(from_trilat("").is_err());
        assert!(from_trilat("TRILAT 2 ball 1 0 0").is_err());
        assert!(from_trilat("TRILAT 1 ball 1 0 0\n0 0 o").is_err());
        assert!(from_trilat("TRILAT 1 annulus 3 2 0 0").is_err());
    }
}
