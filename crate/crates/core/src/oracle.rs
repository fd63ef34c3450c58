//! Brute-force geometric oracle for the torus calculus.
//!
//! Curves are drawn as straight polygonal loops in the unit square with
//! opposite edges identified. Crossings are found by exact rational
//! segment-segment tests, resolved one at a time, and the resulting
//! components are traced and measured by counting signed edge crossings.
//! Nothing here calls into [`crate::torus`] beyond the `TorusClass` type, so
//! the two can be checked against each other.

use std::collections::HashMap;

use num_integer::Integer;
use num_rational::Ratio;
use thiserror::Error;

use crate::torus::{Mode, TorusClass};

pub type Rational = Ratio<i128>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("class {0} is not primitive")]
    NonPrimitive(TorusClass),
    #[error("at least one copy is required")]
    NoCopies,
    #[error("degenerate position: {0}")]
    DegeneratePosition(String),
    #[error("no general-position placement found for {0} against {1}")]
    NoPlacement(TorusClass, TorusClass),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

impl Point {
    fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }
}

fn q(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

fn cross(ax: Rational, ay: Rational, bx: Rational, by: Rational) -> Rational {
    ax * by - ay * bx
}

/// A directed straight segment inside the closed unit square, covering the
/// loop parameter range `[t0, t1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub start: Point,
    pub end: Point,
    pub t0: Rational,
    pub t1: Rational,
}

/// One closed straight loop `t ↦ base + t·direction`, `t ∈ [0, 1)`, in the
/// universal cover, cut into square segments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridLoop {
    pub direction: TorusClass,
    pub base: Point,
    pub segments: Vec<Segment>,
}

impl GridLoop {
    fn build(direction: TorusClass, base: Point) -> Result<Self, OracleError> {
        let zero = Rational::from_integer(0);
        let one = Rational::from_integer(1);
        for v in [&base.x, &base.y] {
            if *v <= zero || *v >= one {
                return Err(OracleError::DegeneratePosition(format!(
                    "base point ({}, {}) is on the square boundary",
                    base.x, base.y
                )));
            }
        }
        let mut breaks: Vec<Rational> = Vec::new();
        let mut push_axis = |start: Rational, speed: i64| -> Result<(), OracleError> {
            if speed == 0 {
                return Ok(());
            }
            let speed = speed as i128;
            // integers strictly between start and start + speed
            let (lo, hi) = if speed > 0 { (1, speed) } else { (speed + 1, 0) };
            for n in lo..=hi {
                let t = (Rational::from_integer(n) - start) / Rational::from_integer(speed);
                if breaks.contains(&t) {
                    return Err(OracleError::DegeneratePosition(format!(
                        "loop of class {direction} passes through a square corner"
                    )));
                }
                breaks.push(t);
            }
            Ok(())
        };
        push_axis(base.x, direction.p)?;
        push_axis(base.y, direction.q)?;
        breaks.push(zero);
        breaks.push(one);
        breaks.sort();

        let px = Rational::from_integer(direction.p as i128);
        let py = Rational::from_integer(direction.q as i128);
        let at = |t: Rational| (base.x + px * t, base.y + py * t);
        let segments = breaks
            .windows(2)
            .map(|w| {
                let (t0, t1) = (w[0], w[1]);
                let (mx, my) = at((t0 + t1) / Rational::from_integer(2));
                let (fx, fy) = (mx.floor(), my.floor());
                let (sx, sy) = at(t0);
                let (ex, ey) = at(t1);
                Segment {
                    start: Point::new(sx - fx, sy - fy),
                    end: Point::new(ex - fx, ey - fy),
                    t0,
                    t1,
                }
            })
            .collect();
        Ok(GridLoop {
            direction,
            base,
            segments,
        })
    }

    fn position(&self, t: Rational) -> (Rational, Rational) {
        (
            self.base.x + Rational::from_integer(self.direction.p as i128) * t,
            self.base.y + Rational::from_integer(self.direction.q as i128) * t,
        )
    }

    /// Signed crossings of the right and top square edges along `[ts, te]`
    /// (cover coordinates, so `te` may exceed 1).
    fn edge_crossings(&self, ts: Rational, te: Rational) -> TorusClass {
        let (xs, ys) = self.position(ts);
        let (xe, ye) = self.position(te);
        TorusClass::new(
            (xe.floor() - xs.floor()).to_integer() as i64,
            (ye.floor() - ys.floor()).to_integer() as i64,
        )
    }
}

/// A multicurve drawn as `copies` disjoint parallel straight loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridCurve {
    pub class_hint: TorusClass,
    pub loops: Vec<GridLoop>,
}

impl GridCurve {
    pub fn copies(&self) -> usize {
        self.loops.len()
    }

    pub fn total_class(&self) -> TorusClass {
        let m = self.loops.len() as i64;
        TorusClass::new(self.class_hint.p * m, self.class_hint.q * m)
    }

    /// Same loops shifted by `(dx, dy)` modulo the square.
    pub fn translated(&self, dx: Rational, dy: Rational) -> Result<GridCurve, OracleError> {
        let loops = self
            .loops
            .iter()
            .map(|l| {
                let x = (l.base.x + dx) - (l.base.x + dx).floor();
                let y = (l.base.y + dy) - (l.base.y + dy).floor();
                GridLoop::build(l.direction, Point::new(x, y))
            })
            .collect::<Result<_, _>>()?;
        Ok(GridCurve {
            class_hint: self.class_hint,
            loops,
        })
    }

    /// Signed counts of segment endpoints on the right and top edges, i.e.
    /// the homology class read off the drawing itself.
    pub fn edge_counts(&self) -> TorusClass {
        let one = Rational::from_integer(1);
        let zero = Rational::from_integer(0);
        let mut right = 0i64;
        let mut top = 0i64;
        for seg in self.loops.iter().flat_map(|l| &l.segments) {
            if seg.end.x == one && seg.start.x < one {
                right += 1;
            }
            if seg.end.x == zero && seg.start.x > zero {
                right -= 1;
            }
            if seg.end.y == one && seg.start.y < one {
                top += 1;
            }
            if seg.end.y == zero && seg.start.y > zero {
                top -= 1;
            }
        }
        TorusClass::new(right, top)
    }

    /// True when no two segments of this drawing meet.
    pub fn is_embedded(&self) -> bool {
        let segs: Vec<(usize, usize, &Segment)> = self
            .loops
            .iter()
            .enumerate()
            .flat_map(|(l, lp)| lp.segments.iter().enumerate().map(move |(i, s)| (l, i, s)))
            .collect();
        for (n, &(la, ia, a)) in segs.iter().enumerate() {
            for &(lb, ib, b) in &segs[n + 1..] {
                // consecutive pieces of one loop share the base point
                if la == lb {
                    let len = self.loops[la].segments.len();
                    if ib == ia + 1 || (ia == 0 && ib == len - 1) {
                        continue;
                    }
                }
                if !matches!(segment_meet(a, b), Meet::None) {
                    return false;
                }
            }
        }
        true
    }
}

/// Draw `copies` parallel straight loops of a primitive class.
pub fn oracle_draw(class: TorusClass, copies: usize) -> Result<GridCurve, OracleError> {
    if !class.is_primitive() {
        return Err(OracleError::NonPrimitive(class));
    }
    if copies == 0 {
        return Err(OracleError::NoCopies);
    }
    let slots = copies as i128 + 1;
    let base = Point::new(q(13, 97), q(29, 89));
    let loops = (0..copies as i128)
        .map(|j| {
            // copies share one gap between consecutive strands
            let (dx, dy) = if class.p != 0 {
                (q(0, 1), q(j, (class.p.unsigned_abs() as i128) * slots))
            } else {
                (q(j, (class.q.unsigned_abs() as i128) * slots), q(0, 1))
            };
            let x = base.x + dx;
            let y = base.y + dy;
            GridLoop::build(class, Point::new(x - x.floor(), y - y.floor()))
        })
        .collect::<Result<_, _>>()?;
    Ok(GridCurve {
        class_hint: class,
        loops,
    })
}

enum Meet {
    None,
    Interior { alpha: Rational, beta: Rational },
    Degenerate(&'static str),
}

fn segment_meet(a: &Segment, b: &Segment) -> Meet {
    let zero = Rational::from_integer(0);
    let one = Rational::from_integer(1);
    let (rx, ry) = (a.end.x - a.start.x, a.end.y - a.start.y);
    let (sx, sy) = (b.end.x - b.start.x, b.end.y - b.start.y);
    let (wx, wy) = (b.start.x - a.start.x, b.start.y - a.start.y);
    let denom = cross(rx, ry, sx, sy);
    if denom == zero {
        if cross(wx, wy, rx, ry) != zero {
            return Meet::None;
        }
        // collinear: compare projections on a's direction
        let len = rx * rx + ry * ry;
        let t0 = (wx * rx + wy * ry) / len;
        let t1 = ((b.end.x - a.start.x) * rx + (b.end.y - a.start.y) * ry) / len;
        let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
        if hi < zero || lo > one {
            return Meet::None;
        }
        return Meet::Degenerate("collinear overlapping segments");
    }
    let alpha = cross(wx, wy, sx, sy) / denom;
    let beta = cross(wx, wy, rx, ry) / denom;
    let inside = |v: Rational| v > zero && v < one;
    let closed = |v: Rational| v >= zero && v <= one;
    if inside(alpha) && inside(beta) {
        Meet::Interior { alpha, beta }
    } else if closed(alpha) && closed(beta) {
        Meet::Degenerate("crossing on a segment endpoint")
    } else {
        Meet::None
    }
}

/// One transverse crossing between a loop of the first curve and a loop of
/// the second.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Crossing {
    pub point: Point,
    pub first_loop: usize,
    pub first_t: Rational,
    pub second_loop: usize,
    pub second_t: Rational,
    pub first_direction: TorusClass,
    pub second_direction: TorusClass,
    /// +1 when the second branch crosses the first from right to left.
    pub index: i8,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CrossingList {
    pub crossings: Vec<Crossing>,
}

impl CrossingList {
    pub fn geometric(&self) -> usize {
        self.crossings.len()
    }

    pub fn algebraic(&self) -> i64 {
        self.crossings.iter().map(|c| c.index as i64).sum()
    }
}

pub fn oracle_crossings(a: &GridCurve, b: &GridCurve) -> Result<CrossingList, OracleError> {
    let mut crossings = Vec::new();
    for (ia, la) in a.loops.iter().enumerate() {
        for (ib, lb) in b.loops.iter().enumerate() {
            for sa in &la.segments {
                for sb in &lb.segments {
                    match segment_meet(sa, sb) {
                        Meet::None => {}
                        Meet::Degenerate(why) => return Err(OracleError::DegeneratePosition(why.to_string())),
                        Meet::Interior { alpha, beta } => {
                            let point = Point::new(
                                sa.start.x + (sa.end.x - sa.start.x) * alpha,
                                sa.start.y + (sa.end.y - sa.start.y) * alpha,
                            );
                            let (u, v) = (la.direction, lb.direction);
                            let det = u.p as i128 * v.q as i128 - u.q as i128 * v.p as i128;
                            crossings.push(Crossing {
                                point,
                                first_loop: ia,
                                first_t: sa.t0 + (sa.t1 - sa.t0) * alpha,
                                second_loop: ib,
                                second_t: sb.t0 + (sb.t1 - sb.t0) * beta,
                                first_direction: u,
                                second_direction: v,
                                index: det.signum() as i8,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(CrossingList { crossings })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleCount {
    pub geometric: usize,
    pub algebraic: i64,
}

pub fn oracle_intersection(a: &GridCurve, b: &GridCurve) -> Result<OracleCount, OracleError> {
    let list = oracle_crossings(a, b)?;
    Ok(OracleCount {
        geometric: list.geometric(),
        algebraic: list.algebraic(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Side {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum End {
    In,
    Out,
}

struct Arc {
    side: Side,
    start: usize,
    end: usize,
    class: TorusClass,
}

/// Resolve every crossing of `a` with `b` and return the classes of the
/// resulting components, oriented so that arcs of `a` run forwards.
pub fn oracle_resolve(a: &GridCurve, b: &GridCurve, mode: Mode) -> Result<Vec<TorusClass>, OracleError> {
    let list = oracle_crossings(a, b)?;
    let xs = &list.crossings;

    // crossing ids along every loop, sorted by parameter
    let mut along: HashMap<(Side, usize), Vec<(Rational, usize)>> = HashMap::new();
    for (id, c) in xs.iter().enumerate() {
        along
            .entry((Side::First, c.first_loop))
            .or_default()
            .push((c.first_t, id));
        along
            .entry((Side::Second, c.second_loop))
            .or_default()
            .push((c.second_t, id));
    }

    let mut arcs: Vec<Arc> = Vec::new();
    // (crossing, side, end) -> arc id
    let mut branch: HashMap<(usize, Side, End), usize> = HashMap::new();
    let mut keys: Vec<_> = along.keys().copied().collect();
    keys.sort_by_key(|(s, l)| (*s == Side::Second, *l));
    for key in keys {
        let (side, loop_id) = key;
        let pts = along.get_mut(&key).expect("present");
        pts.sort();
        let grid = match side {
            Side::First => &a.loops[loop_id],
            Side::Second => &b.loops[loop_id],
        };
        let n = pts.len();
        for j in 0..n {
            let (ts, cs) = pts[j];
            let (mut te, ce) = pts[(j + 1) % n];
            if j + 1 == n {
                te += Rational::from_integer(1);
            }
            let id = arcs.len();
            arcs.push(Arc {
                side,
                start: cs,
                end: ce,
                class: grid.edge_crossings(ts, te),
            });
            branch.insert((cs, side, End::Out), id);
            branch.insert((ce, side, End::In), id);
        }
    }

    // For sharp the second curve is oriented so each crossing has index +1,
    // for flat so it has index -1; then arcs are joined orientably.
    let orient = |c: &Crossing| -> i8 {
        match mode {
            Mode::Sharp => c.index,
            Mode::Flat => -c.index,
        }
    };
    let partner = |cross: usize, side: Side, end: End| -> (Side, End) {
        let same = orient(&xs[cross]) > 0;
        match (side, end, same) {
            (Side::First, End::In, true) => (Side::Second, End::Out),
            (Side::Second, End::Out, true) => (Side::First, End::In),
            (Side::Second, End::In, true) => (Side::First, End::Out),
            (Side::First, End::Out, true) => (Side::Second, End::In),
            (Side::First, End::In, false) => (Side::Second, End::In),
            (Side::Second, End::In, false) => (Side::First, End::In),
            (Side::Second, End::Out, false) => (Side::First, End::Out),
            (Side::First, End::Out, false) => (Side::Second, End::Out),
        }
    };

    let mut components = Vec::new();
    let mut used = vec![false; arcs.len()];
    let first_arcs = (0..arcs.len()).filter(|&i| arcs[i].side == Side::First);
    let second_arcs = (0..arcs.len()).filter(|&i| arcs[i].side == Side::Second);
    for start in first_arcs.chain(second_arcs) {
        if used[start] {
            continue;
        }
        let mut class = TorusClass::EMPTY;
        let (mut arc, mut forward) = (start, true);
        loop {
            used[arc] = true;
            let a_ = &arcs[arc];
            class = if forward {
                TorusClass::new(class.p + a_.class.p, class.q + a_.class.q)
            } else {
                TorusClass::new(class.p - a_.class.p, class.q - a_.class.q)
            };
            let (cross, end) = if forward {
                (a_.end, End::In)
            } else {
                (a_.start, End::Out)
            };
            let (side, pend) = partner(cross, a_.side, end);
            let next = branch[&(cross, side, pend)];
            forward = pend == End::Out;
            arc = next;
            if arc == start && forward {
                break;
            }
            if used[arc] {
                return Err(OracleError::DegeneratePosition(
                    "resolution trace revisited an arc".to_string(),
                ));
            }
        }
        components.push(class);
    }

    // loops without crossings survive untouched
    let second_sign = xs.first().map(|c| orient(c) as i64).unwrap_or(1);
    for (i, l) in a.loops.iter().enumerate() {
        if !along.contains_key(&(Side::First, i)) {
            components.push(l.direction);
        }
    }
    for (i, l) in b.loops.iter().enumerate() {
        if !along.contains_key(&(Side::Second, i)) {
            components.push(TorusClass::new(
                l.direction.p * second_sign,
                l.direction.q * second_sign,
            ));
        }
    }
    debug_assert!(used.iter().all(|u| *u));
    Ok(components)
}

pub fn total_class(components: &[TorusClass]) -> TorusClass {
    components
        .iter()
        .fold(TorusClass::EMPTY, |acc, c| TorusClass::new(acc.p + c.p, acc.q + c.q))
}

/// Draw both multicurves and shift the second until the pair is in general
/// position.
pub fn draw_pair(
    first: TorusClass,
    first_copies: usize,
    second: TorusClass,
    second_copies: usize,
) -> Result<(GridCurve, GridCurve), OracleError> {
    let a = oracle_draw(first, first_copies)?;
    let b0 = oracle_draw(second, second_copies)?;
    for k in 1..64i128 {
        let dx = q(k * 7 + 3, 211 + 4 * k);
        let dy = q(k * 11 + 5, 307 + 6 * k);
        let b = match b0.translated(dx, dy) {
            Ok(b) => b,
            Err(OracleError::DegeneratePosition(_)) => continue,
            Err(e) => return Err(e),
        };
        if oracle_crossings(&a, &b).is_ok() {
            return Ok((a, b));
        }
    }
    Err(OracleError::NoPlacement(first, second))
}

/// Every primitive class with entries in `[-range, range]`.
pub fn primitive_classes(range: i64) -> Vec<TorusClass> {
    let mut out = Vec::new();
    for p in -range..=range {
        for qv in -range..=range {
            if p.unsigned_abs().gcd(&qv.unsigned_abs()) == 1 {
                out.push(TorusClass::new(p, qv));
            }
        }
    }
    out
}
