//! Rotation numbers from the closest returns of the critical orbit.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

#[allow(unused_imports)]
use num_traits::Float;

use super::lift::{circle_turns, CircleLift};
use crate::error::{Error, Result};

/// Returns closer than this count as hitting the critical point.
pub const PERIODIC_TOL: f64 = 1e-13;

/// Successive approach steps smaller than this mean the orbit is locked.
pub const STALL_TOL: f64 = 1e-13;

/// Longest orbit segment ever computed.
pub const MAX_RETURN: u64 = 1 << 24;

/// Orbit of the critical point stored as whole turns plus a reduced part.
#[derive(Debug)]
pub struct CriticalOrbit<'a> {
    f: &'a dyn CircleLift,
    turns: Vec<i64>,
    points: Vec<f64>,
}

impl<'a> CriticalOrbit<'a> {
    pub fn new(f: &'a dyn CircleLift) -> Self {
        Self::starting_at(f, 0.0)
    }

    /// Orbit of an arbitrary point `x` in `[-1/2, 1/2)`.
    pub fn starting_at(f: &'a dyn CircleLift, x: f64) -> Self {
        Self {
            f,
            turns: vec![0],
            points: vec![x],
        }
    }

    fn ensure(&mut self, t: usize) {
        while self.points.len() <= t {
            let last = self.points.len() - 1;
            let y = self.f.lift(self.points[last]);
            let n = circle_turns(y);
            self.points.push(y - n);
            self.turns.push(self.turns[last] + n as i64);
        }
    }

    /// `(turns, reduced point)` of `F^t(x)`.
    pub fn at(&mut self, t: usize) -> (i64, f64) {
        self.ensure(t);
        (self.turns[t], self.points[t])
    }

    /// `F^t(x) - p`, exact in the integer part.
    pub fn displacement(&mut self, t: usize, p: i64) -> f64 {
        let (k, r) = self.at(t);
        (k - p) as f64 + r
    }
}

/// Partial quotients with their convergents.
///
/// `a[n]` drives `q[n+1] = a[n] q[n] + q[n-1]` with `q[-1] = 0`, `q[0] = 1`,
/// `p[-1] = 1`, `p[0]` the integer part. The vectors `p`, `q` and `returns`
/// start at index `0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuedFraction {
    pub a: Vec<u64>,
    pub p: Vec<i64>,
    pub q: Vec<u64>,
    /// `F^{q_n}(0) - p_n`, the signed closest returns.
    pub returns: Vec<f64>,
}

impl ContinuedFraction {
    /// Convergents of `p0 + [0; a_0, a_1, ...]` without return data.
    pub fn from_quotients(p0: i64, a: &[u64]) -> Self {
        let (mut p, mut q) = (vec![p0], vec![1u64]);
        let (mut p_prev, mut q_prev) = (1i64, 0u64);
        for &an in a {
            let (pn, qn) = (p[p.len() - 1], q[q.len() - 1]);
            p.push(an as i64 * pn + p_prev);
            q.push(an * qn + q_prev);
            p_prev = pn;
            q_prev = qn;
        }
        Self {
            a: a.to_vec(),
            p,
            q,
            returns: Vec::new(),
        }
    }

    /// Number of partial quotients.
    pub fn depth(&self) -> usize {
        self.a.len()
    }

    /// `q_n` for `n >= -1`.
    pub fn q_at(&self, n: isize) -> u64 {
        if n < 0 {
            0
        } else {
            self.q[n as usize]
        }
    }

    /// `p_n` for `n >= -1`.
    pub fn p_at(&self, n: isize) -> i64 {
        if n < 0 {
            1
        } else {
            self.p[n as usize]
        }
    }

    /// The deepest convergent.
    pub fn value(&self) -> f64 {
        let n = self.q.len() - 1;
        self.p[n] as f64 / self.q[n] as f64
    }

    /// Whether `|returns[n]|` strictly decreases.
    pub fn returns_decreasing(&self) -> bool {
        self.returns.windows(2).all(|w| w[1].abs() < w[0].abs())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RotationReport {
    pub rho: f64,
    pub cf: ContinuedFraction,
    pub returns_decreasing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Stop {
    /// The orbit hit the critical point; the next quotient is infinite.
    Hit { period: u64, numerator: i64 },
    /// The orbit never crossed; the current quotient is infinite.
    Locked { period: u64, numerator: i64 },
    Overflow,
    /// The quotient exceeded the caller's cap; it is recorded as cap + 1.
    Capped,
}

fn sign(x: f64) -> bool {
    x > 0.0
}

fn scan(f: &dyn CircleLift, depth: usize, caps: Option<&[u64]>) -> (ContinuedFraction, Option<Stop>) {
    let mut orbit = CriticalOrbit::new(f);
    let (k1, r1) = orbit.at(1);
    let p0 = if r1 >= 0.0 { k1 } else { k1 - 1 };
    let e0 = orbit.displacement(1, p0);
    let mut cf = ContinuedFraction {
        a: Vec::new(),
        p: vec![p0],
        q: vec![1],
        returns: vec![e0],
    };
    if e0.abs() <= PERIODIC_TOL {
        return (
            cf,
            Some(Stop::Hit {
                period: 1,
                numerator: p0,
            }),
        );
    }
    let (mut p_prev, mut q_prev, mut e_prev) = (1i64, 0u64, -1.0f64);
    for _ in 0..depth {
        let n = cf.q.len() - 1;
        let (pn, qn) = (cf.p[n], cf.q[n]);
        let side = sign(e_prev);
        let mut last = e_prev;
        let mut a = 0u64;
        let cap = caps.and_then(|c| c.get(n)).copied().unwrap_or(u64::MAX);
        let stop = loop {
            if a > cap {
                break Some(Stop::Capped);
            }
            let t = q_prev + (a + 1) * qn;
            if t > MAX_RETURN {
                break Some(Stop::Overflow);
            }
            let num = p_prev + (a as i64 + 1) * pn;
            let x = orbit.displacement(t as usize, num);
            if x.abs() <= PERIODIC_TOL {
                a += 1;
                last = x;
                break Some(Stop::Hit {
                    period: t,
                    numerator: num,
                });
            }
            if sign(x) != side {
                break None;
            }
            if a > 0 && (x - last).abs() <= STALL_TOL {
                break Some(Stop::Locked {
                    period: qn,
                    numerator: pn,
                });
            }
            a += 1;
            last = x;
        };
        match stop {
            Some(Stop::Hit { .. }) | Some(Stop::Capped) | None => {
                if a == 0 {
                    return (cf, Some(Stop::Overflow));
                }
                cf.a.push(a);
                cf.p.push(a as i64 * pn + p_prev);
                cf.q.push(a * qn + q_prev);
                cf.returns.push(last);
                p_prev = pn;
                q_prev = qn;
                e_prev = cf.returns[n];
                if stop.is_some() {
                    return (cf, stop);
                }
            }
            other => return (cf, other),
        }
    }
    (cf, None)
}

/// Partial quotients up to `depth` from closest-return combinatorics.
pub fn rotation_number(f: &dyn CircleLift, depth: usize) -> Result<RotationReport> {
    let (cf, stop) = scan(f, depth, None);
    match stop {
        None => Ok(RotationReport {
            rho: cf.value(),
            returns_decreasing: cf.returns_decreasing(),
            cf,
        }),
        Some(Stop::Hit { period, numerator }) | Some(Stop::Locked { period, numerator }) => {
            Err(Error::Periodic { period, numerator })
        }
        Some(_) => Err(Error::ReturnTimeOverflow { limit: MAX_RETURN }),
    }
}

/// Orders rotation numbers by their expansions, `Less` meaning smaller.
/// `None` marks an infinite quotient.
fn compare_expansions(candidate: &[Option<u64>], target: &[u64]) -> Ordering {
    for (i, &t) in target.iter().enumerate() {
        let c = candidate.get(i).copied().unwrap_or(None);
        let ord = match c {
            None => Ordering::Greater,
            Some(c) => c.cmp(&t),
        };
        if ord != Ordering::Equal {
            // a larger quotient at an even index means a smaller number
            return if i % 2 == 0 { ord.reverse() } else { ord };
        }
    }
    Ordering::Equal
}

fn expansion(f: &dyn CircleLift, target: &[u64]) -> Result<(i64, Vec<Option<u64>>)> {
    let (cf, stop) = scan(f, target.len(), Some(target));
    let mut out: Vec<Option<u64>> = cf.a.iter().map(|&a| Some(a)).collect();
    match stop {
        Some(Stop::Overflow) => return Err(Error::ReturnTimeOverflow { limit: MAX_RETURN }),
        Some(Stop::Capped) | None => {}
        Some(_) => out.push(None),
    }
    Ok((cf.p[0], out))
}

/// Parameter of a monotone family whose rotation number has integer part
/// `p0` and partial quotients starting with `target`.
///
/// Bisects until the candidate matches the whole prefix or the bracket is
/// narrower than `1e-14`.
pub fn find_parameter<L, F>(family: F, lo: f64, hi: f64, p0: i64, target: &[u64]) -> Result<f64>
where
    L: CircleLift,
    F: Fn(f64) -> L,
{
    let cmp = |x: f64| -> Result<Ordering> {
        let (p, e) = expansion(&family(x), target)?;
        Ok(match p.cmp(&p0) {
            Ordering::Equal => compare_expansions(&e, target),
            other => other,
        })
    };
    let (mut lo, mut hi) = (lo, hi);
    if cmp(lo)? == Ordering::Greater || cmp(hi)? == Ordering::Less {
        return Err(Error::PrefixUnreachable);
    }
    let mut mid = 0.5 * (lo + hi);
    while hi - lo > 1e-14 {
        mid = 0.5 * (lo + hi);
        match cmp(mid)? {
            Ordering::Less => lo = mid,
            Ordering::Greater => hi = mid,
            Ordering::Equal => break,
        }
    }
    let report = rotation_number(&family(mid), target.len()).map_err(|_| Error::PrefixUnreachable)?;
    if report.cf.p[0] != p0 || report.cf.a != target {
        return Err(Error::PrefixUnreachable);
    }
    Ok(mid)
}

/// The golden-mean prefix `1, 1, ...` of length `n`.
pub fn golden_prefix(n: usize) -> Vec<u64> {
    vec![1; n]
}
