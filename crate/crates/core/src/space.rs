//! Compact metric spaces from a small catalog: the unit circle (exact
//! rational or f64 coordinates), finite discrete sets, finite products
//! under the sup metric, and hyperspaces of finite point sets under the
//! Hausdorff distance. Each space can cover itself (or any ball) by
//! finitely many closed balls of a requested radius.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error("point does not belong to this space")]
    WrongPoint,
    #[error("cover of {0} balls exceeds the {1}-ball cap")]
    CoverTooLarge(usize, usize),
    #[error("cover radius must be positive")]
    BadRadius,
    #[error("discrete space needs at least one point")]
    EmptyDiscrete,
}

/// Circle coordinate in `[0, 1)`, exact or floating.
#[derive(Clone, PartialEq, Debug)]
pub enum Coord {
    Exact(BigRational),
    Float(f64),
}

impl Coord {
    pub fn exact(q: BigRational) -> Coord {
        Coord::Exact(wrap_exact(q))
    }

    pub fn float(x: f64) -> Coord {
        Coord::Float(wrap_float(x))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Coord::Exact(q) => q.to_f64().unwrap_or(0.0),
            Coord::Float(x) => *x,
        }
    }
}

pub(crate) fn wrap_exact(q: BigRational) -> BigRational {
    let f = q.fract();
    if f.is_negative() {
        f + BigRational::one()
    } else {
        f
    }
}

pub(crate) fn wrap_float(x: f64) -> f64 {
    let f = x.rem_euclid(1.0);
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Wrap-around distance on the circle; exact when both ends are exact.
fn circle_dist(a: &Coord, b: &Coord) -> f64 {
    match (a, b) {
        (Coord::Exact(x), Coord::Exact(y)) => {
            let d = wrap_exact(x - y);
            let d = if d > BigRational::new(BigInt::one(), BigInt::from(2)) {
                BigRational::one() - d
            } else {
                d
            };
            if d.is_zero() {
                0.0
            } else {
                d.to_f64().unwrap_or(0.0)
            }
        }
        _ => {
            let d = (a.to_f64() - b.to_f64()).rem_euclid(1.0);
            d.min(1.0 - d)
        }
    }
}

/// A point of one of the catalog spaces.
#[derive(Clone, PartialEq, Debug)]
pub enum Point {
    Circle(Coord),
    Discrete(u64),
    Tuple(Vec<Point>),
    /// A nonempty finite set, kept sorted and deduplicated.
    Set(Vec<Point>),
}

impl Point {
    pub fn circle_exact(n: i64, d: i64) -> Point {
        Point::Circle(Coord::exact(BigRational::new(BigInt::from(n), BigInt::from(d))))
    }

    pub fn circle_float(x: f64) -> Point {
        Point::Circle(Coord::float(x))
    }

    pub fn set(points: Vec<Point>) -> Point {
        let mut points = points;
        points.sort_by(point_cmp);
        points.dedup();
        Point::Set(points)
    }
}

/// Total order used only to canonicalize set elements.
pub(crate) fn point_cmp(a: &Point, b: &Point) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    match (a, b) {
        (Point::Circle(x), Point::Circle(y)) => match (x, y) {
            (Coord::Exact(p), Coord::Exact(q)) => p.cmp(q),
            _ => x.to_f64().total_cmp(&y.to_f64()),
        },
        (Point::Discrete(x), Point::Discrete(y)) => x.cmp(y),
        (Point::Tuple(xs), Point::Tuple(ys)) | (Point::Set(xs), Point::Set(ys)) => {
            for (x, y) in xs.iter().zip(ys.iter()) {
                let c = point_cmp(x, y);
                if c != Ordering::Equal {
                    return c;
                }
            }
            xs.len().cmp(&ys.len())
        }
        (Point::Circle(_), _) => Ordering::Less,
        (_, Point::Circle(_)) => Ordering::Greater,
        (Point::Discrete(_), _) => Ordering::Less,
        (_, Point::Discrete(_)) => Ordering::Greater,
        (Point::Tuple(_), _) => Ordering::Less,
        (_, Point::Tuple(_)) => Ordering::Greater,
    }
}

/// A catalog space.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "kebab-case")]
pub enum Space {
    /// Unit circle with exact rational coordinates.
    CircleExact,
    /// Unit circle with f64 coordinates.
    CircleFloat,
    /// `{0, …, size−1}` with the discrete metric.
    Discrete { size: u64 },
    /// Finite product under the sup metric.
    Product { components: Vec<Space> },
    /// Nonempty finite subsets of the base under the Hausdorff metric.
    Hyperspace { base: Box<Space> },
}

/// A closed ball.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

/// Intersection of finitely many closed balls.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct Region {
    pub balls: Vec<Ball>,
}

impl Region {
    pub fn whole() -> Region {
        Region { balls: Vec::new() }
    }

    pub fn and(&self, ball: Ball) -> Region {
        let mut balls = self.balls.clone();
        balls.push(ball);
        Region { balls }
    }

    pub fn contains(&self, space: &Space, p: &Point) -> bool {
        self.balls
            .iter()
            .all(|b| space.distance(&b.center, p) <= b.radius)
    }
}

const COVER_CAP: usize = 8192;

impl Space {
    pub fn contains(&self, p: &Point) -> bool {
        match (self, p) {
            (Space::CircleExact, Point::Circle(Coord::Exact(_))) => true,
            (Space::CircleFloat, Point::Circle(Coord::Float(_))) => true,
            (Space::Discrete { size }, Point::Discrete(i)) => i < size,
            (Space::Product { components }, Point::Tuple(ps)) => {
                components.len() == ps.len()
                    && components.iter().zip(ps).all(|(s, p)| s.contains(p))
            }
            (Space::Hyperspace { base }, Point::Set(ps)) => {
                !ps.is_empty() && ps.iter().all(|p| base.contains(p))
            }
            _ => false,
        }
    }

    /// Distance; exact zeros stay exactly `0.0`.
    pub fn distance(&self, a: &Point, b: &Point) -> f64 {
        match (self, a, b) {
            (Space::CircleExact | Space::CircleFloat, Point::Circle(x), Point::Circle(y)) => {
                circle_dist(x, y)
            }
            (Space::Discrete { .. }, Point::Discrete(x), Point::Discrete(y)) => {
                if x == y {
                    0.0
                } else {
                    1.0
                }
            }
            (Space::Product { components }, Point::Tuple(xs), Point::Tuple(ys)) => components
                .iter()
                .zip(xs.iter().zip(ys))
                .map(|(s, (x, y))| s.distance(x, y))
                .fold(0.0, f64::max),
            (Space::Hyperspace { base }, Point::Set(xs), Point::Set(ys)) => {
                let one_way = |from: &[Point], to: &[Point]| -> f64 {
                    from.iter()
                        .map(|x| {
                            to.iter()
                                .map(|y| base.distance(x, y))
                                .fold(f64::INFINITY, f64::min)
                        })
                        .fold(0.0, f64::max)
                };
                one_way(xs, ys).max(one_way(ys, xs))
            }
            _ => f64::INFINITY,
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Space::CircleExact | Space::CircleFloat => 0.5,
            Space::Discrete { .. } => 1.0,
            Space::Product { components } => components
                .iter()
                .map(|s| s.diameter())
                .fold(0.0, f64::max),
            Space::Hyperspace { base } => base.diameter(),
        }
    }

    /// Finite cover of the whole space by closed `radius`-balls. Grid
    /// spacing stays at or below the radius, so membership tests have
    /// half a radius of slack against rounding.
    pub fn epsilon_net(&self, radius: f64) -> Result<Vec<Ball>, SpaceError> {
        if !(radius > 0.0) {
            return Err(SpaceError::BadRadius);
        }
        let centers = self.net_centers(radius)?;
        if centers.len() > COVER_CAP {
            return Err(SpaceError::CoverTooLarge(centers.len(), COVER_CAP));
        }
        Ok(centers.into_iter().map(|c| Ball { center: c, radius }).collect())
    }

    fn net_centers(&self, radius: f64) -> Result<Vec<Point>, SpaceError> {
        match self {
            Space::CircleExact => {
                let m = (1.0 / radius).ceil().max(1.0) as i64;
                Ok((0..m)
                    .map(|i| {
                        Point::Circle(Coord::exact(BigRational::new(
                            BigInt::from(i),
                            BigInt::from(m),
                        )))
                    })
                    .collect())
            }
            Space::CircleFloat => {
                let m = (1.0 / radius).ceil().max(1.0) as i64;
                Ok((0..m)
                    .map(|i| Point::Circle(Coord::float(i as f64 / m as f64)))
                    .collect())
            }
            Space::Discrete { size } => {
                if *size == 0 {
                    return Err(SpaceError::EmptyDiscrete);
                }
                Ok((0..*size).map(Point::Discrete).collect())
            }
            Space::Product { components } => {
                let mut acc: Vec<Vec<Point>> = vec![Vec::new()];
                for comp in components {
                    let centers = comp.net_centers(radius)?;
                    let mut next = Vec::with_capacity(acc.len() * centers.len());
                    for prefix in &acc {
                        for c in &centers {
                            let mut t = prefix.clone();
                            t.push(c.clone());
                            next.push(t);
                        }
                    }
                    acc = next;
                    if acc.len() > COVER_CAP {
                        return Err(SpaceError::CoverTooLarge(acc.len(), COVER_CAP));
                    }
                }
                Ok(acc.into_iter().map(Point::Tuple).collect())
            }
            Space::Hyperspace { base } => {
                let centers = base.net_centers(radius)?;
                if centers.len() > 12 {
                    return Err(SpaceError::CoverTooLarge(1 << centers.len().min(30), COVER_CAP));
                }
                let n = centers.len();
                let mut out = Vec::new();
                for mask in 1u32..(1 << n) {
                    let subset: Vec<Point> = (0..n)
                        .filter(|i| mask & (1 << i) != 0)
                        .map(|i| centers[i].clone())
                        .collect();
                    out.push(Point::set(subset));
                }
                Ok(out)
            }
        }
    }

    /// Balls of the given radius covering one ball: the global net
    /// filtered to centers that can reach it.
    pub fn cover_ball(&self, ball: &Ball, radius: f64) -> Result<Vec<Ball>, SpaceError> {
        let net = self.epsilon_net(radius)?;
        Ok(net
            .into_iter()
            .filter(|b| self.distance(&b.center, &ball.center) <= ball.radius + radius)
            .collect())
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Point {
        match self {
            Space::CircleExact => {
                let d = 256u32;
                Point::Circle(Coord::exact(BigRational::new(
                    BigInt::from(rng.gen_range(0..d)),
                    BigInt::from(d),
                )))
            }
            Space::CircleFloat => Point::Circle(Coord::float(rng.gen::<f64>())),
            Space::Discrete { size } => Point::Discrete(rng.gen_range(0..(*size).max(1))),
            Space::Product { components } => {
                Point::Tuple(components.iter().map(|s| s.sample(rng)).collect())
            }
            Space::Hyperspace { base } => {
                let n = rng.gen_range(1..=3usize);
                Point::set((0..n).map(|_| base.sample(rng)).collect())
            }
        }
    }
}

// Point wire format: {"circle": "p/q" | number} | {"discrete": n} |
// {"tuple": [...]} | {"set": [...]}
impl Serialize for Point {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(1))?;
        match self {
            Point::Circle(Coord::Exact(q)) => map.serialize_entry("circle", &q.to_string())?,
            Point::Circle(Coord::Float(x)) => map.serialize_entry("circle", x)?,
            Point::Discrete(i) => map.serialize_entry("discrete", i)?,
            Point::Tuple(ps) => map.serialize_entry("tuple", ps)?,
            Point::Set(ps) => map.serialize_entry("set", ps)?,
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum CircleRepr {
            Text(String),
            Num(f64),
        }
        #[derive(Deserialize)]
        enum Repr {
            #[serde(rename = "circle")]
            Circle(CircleRepr),
            #[serde(rename = "discrete")]
            Discrete(u64),
            #[serde(rename = "tuple")]
            Tuple(Vec<Point>),
            #[serde(rename = "set")]
            Set(Vec<Point>),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Circle(CircleRepr::Text(s)) => {
                let q: BigRational = s
                    .parse()
                    .map_err(|e| D::Error::custom(format!("bad rational {s:?}: {e}")))?;
                Ok(Point::Circle(Coord::exact(q)))
            }
            Repr::Circle(CircleRepr::Num(x)) => Ok(Point::Circle(Coord::float(x))),
            Repr::Discrete(i) => Ok(Point::Discrete(i)),
            Repr::Tuple(ps) => Ok(Point::Tuple(ps)),
            Repr::Set(ps) => Ok(Point::set(ps)),
        }
    }
}
