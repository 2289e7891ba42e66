//! Piecewise-smooth paths `λ(s) = (θ(s), φ(s))` on the orientation sphere.
//!
//! A [`SpherePath`] is a list of [`Segment`]s, each parametrized by `s ∈ [0, 1]`.
//! Consecutive segments must join continuously; corners are allowed.
//!
//! # Text format
//!
//! One segment per line; blank lines and `#` comments are ignored. Angles are
//! in radians and may be arithmetic expressions using `pi`, e.g. `2*pi/3`.
//!
//! ```text
//! latitude(theta, phi_start, phi_end)       # θ fixed, φ swept linearly
//! longitude(phi, theta_start, theta_end)    # φ fixed, θ swept linearly
//! parametric(t0 p0; t1 p1; ...; tn pn)      # natural cubic spline through (θ, φ) samples
//! modulated(theta0, phi_start, phi_end; c1, c2, ...)   # θ = θ0 + Σ c_k sin(kπs)
//! ```
//!
//! The built-in names `circle`, `square`, `equator` and `longitude` are
//! accepted wherever a path is expected (see [`builtin`]).

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::path::Path;

use crate::{Error, Result};

/// Continuity tolerance at segment junctions and for loop closure.
pub const JOIN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint {
    pub theta: f64,
    pub phi: f64,
}

impl SpherePoint {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    /// Same orientation, comparing `φ` modulo `2π` and ignoring it at the poles.
    pub fn same_orientation(&self, other: &SpherePoint, tol: f64) -> bool {
        if (self.theta - other.theta).abs() > tol {
            return false;
        }
        if self.theta.abs() <= tol || (self.theta - PI).abs() <= tol {
            return true;
        }
        wrap_angle(self.phi - other.phi).abs() <= tol
    }
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(TAU) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

/// Natural cubic spline through uniformly spaced samples on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicCurve {
    values: Vec<f64>,
    second: Vec<f64>,
}

impl CubicCurve {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return Err(Error::InvalidPath(
                "a parametric segment needs at least two samples".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidPath("non-finite sample".into()));
        }
        let mut second = vec![0.0; n];
        if n > 2 {
            // Uniform knots: M[i-1] + 4 M[i] + M[i+1] = 6 (y[i-1] − 2y[i] + y[i+1]) / h²
            let h = 1.0 / (n - 1) as f64;
            let m = n - 2;
            let mut diag = vec![4.0; m];
            let mut rhs: Vec<f64> = (1..n - 1)
                .map(|i| 6.0 * (values[i - 1] - 2.0 * values[i] + values[i + 1]) / (h * h))
                .collect();
            for i in 1..m {
                let w = 1.0 / diag[i - 1];
                diag[i] -= w;
                rhs[i] -= w * rhs[i - 1];
            }
            second[m] = rhs[m - 1] / diag[m - 1];
            for i in (0..m - 1).rev() {
                second[i + 1] = (rhs[i] - second[i + 2]) / diag[i];
            }
        }
        Ok(Self { values, second })
    }

    pub fn samples(&self) -> &[f64] {
        &self.values
    }

    fn locate(&self, s: f64) -> (usize, f64, f64) {
        let n = self.values.len();
        let h = 1.0 / (n - 1) as f64;
        let x = s.clamp(0.0, 1.0) * (n - 1) as f64;
        let i = (x.floor() as usize).min(n - 2);
        (i, x - i as f64, h)
    }

    pub fn value(&self, s: f64) -> f64 {
        let (i, t, h) = self.locate(s);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.second[i], self.second[i + 1]);
        let a = 1.0 - t;
        a * y0 + t * y1 + h * h / 6.0 * ((a * a * a - a) * m0 + (t * t * t - t) * m1)
    }

    pub fn derivative(&self, s: f64) -> f64 {
        let (i, t, h) = self.locate(s);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.second[i], self.second[i + 1]);
        let a = 1.0 - t;
        (y1 - y0) / h + h / 6.0 * (-(3.0 * a * a - 1.0) * m0 + (3.0 * t * t - 1.0) * m1)
    }

    fn reversed(&self) -> Self {
        let mut values = self.values.clone();
        let mut second = self.second.clone();
        values.reverse();
        second.reverse();
        Self { values, second }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SegmentKind {
    /// Constant `θ`, `φ` linear in `s`.
    Latitude {
        theta: f64,
        phi_start: f64,
        phi_end: f64,
    },
    /// Constant `φ`, `θ` linear in `s`.
    Longitude {
        phi: f64,
        theta_start: f64,
        theta_end: f64,
    },
    /// `θ(s) = θ₀ + Σ_k c_k sin(kπs)`, `φ` linear in `s`. The endpoints sit at `θ₀`.
    Modulated {
        base_theta: f64,
        phi_start: f64,
        phi_end: f64,
        harmonics: Vec<f64>,
    },
    /// Cubic interpolation through sampled points.
    Parametric { theta: CubicCurve, phi: CubicCurve },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub kind: SegmentKind,
    pub label: String,
}

impl Segment {
    pub fn latitude(theta: f64, phi_start: f64, phi_end: f64) -> Self {
        Self {
            label: format!("latitude(theta={theta:.6}, {phi_start:.6} -> {phi_end:.6})"),
            kind: SegmentKind::Latitude {
                theta,
                phi_start,
                phi_end,
            },
        }
    }

    pub fn longitude(phi: f64, theta_start: f64, theta_end: f64) -> Self {
        Self {
            label: format!("longitude(phi={phi:.6}, {theta_start:.6} -> {theta_end:.6})"),
            kind: SegmentKind::Longitude {
                phi,
                theta_start,
                theta_end,
            },
        }
    }

    pub fn modulated(base_theta: f64, phi_start: f64, phi_end: f64, harmonics: Vec<f64>) -> Self {
        Self {
            label: format!(
                "modulated(theta={base_theta:.6}, {phi_start:.6} -> {phi_end:.6}, {} harmonics)",
                harmonics.len()
            ),
            kind: SegmentKind::Modulated {
                base_theta,
                phi_start,
                phi_end,
                harmonics,
            },
        }
    }

    pub fn parametric(points: &[SpherePoint]) -> Result<Self> {
        let theta = CubicCurve::new(points.iter().map(|p| p.theta).collect())?;
        let phi = CubicCurve::new(points.iter().map(|p| p.phi).collect())?;
        Ok(Self {
            label: format!("parametric({} samples)", points.len()),
            kind: SegmentKind::Parametric { theta, phi },
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn point(&self, s: f64) -> SpherePoint {
        match &self.kind {
            SegmentKind::Latitude {
                theta,
                phi_start,
                phi_end,
            } => SpherePoint::new(*theta, lerp(*phi_start, *phi_end, s)),
            SegmentKind::Longitude {
                phi,
                theta_start,
                theta_end,
            } => SpherePoint::new(lerp(*theta_start, *theta_end, s), *phi),
            SegmentKind::Modulated {
                base_theta,
                phi_start,
                phi_end,
                harmonics,
            } => {
                let delta: f64 = harmonics
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c * ((k + 1) as f64 * PI * s).sin())
                    .sum();
                SpherePoint::new(base_theta + delta, lerp(*phi_start, *phi_end, s))
            }
            SegmentKind::Parametric { theta, phi } => {
                SpherePoint::new(theta.value(s), phi.value(s))
            }
        }
    }

    /// `(dθ/ds, dφ/ds)`
    pub fn derivative(&self, s: f64) -> (f64, f64) {
        match &self.kind {
            SegmentKind::Latitude {
                phi_start, phi_end, ..
            } => (0.0, phi_end - phi_start),
            SegmentKind::Longitude {
                theta_start,
                theta_end,
                ..
            } => (theta_end - theta_start, 0.0),
            SegmentKind::Modulated {
                phi_start,
                phi_end,
                harmonics,
                ..
            } => {
                let d: f64 = harmonics
                    .iter()
                    .enumerate()
                    .map(|(k, c)| {
                        let w = (k + 1) as f64 * PI;
                        c * w * (w * s).cos()
                    })
                    .sum();
                (d, phi_end - phi_start)
            }
            SegmentKind::Parametric { theta, phi } => (theta.derivative(s), phi.derivative(s)),
        }
    }

    pub fn start(&self) -> SpherePoint {
        self.point(0.0)
    }

    pub fn end(&self) -> SpherePoint {
        self.point(1.0)
    }

    /// The same curve traversed backwards.
    pub fn reversed(&self) -> Self {
        let kind = match &self.kind {
            SegmentKind::Latitude {
                theta,
                phi_start,
                phi_end,
            } => SegmentKind::Latitude {
                theta: *theta,
                phi_start: *phi_end,
                phi_end: *phi_start,
            },
            SegmentKind::Longitude {
                phi,
                theta_start,
                theta_end,
            } => SegmentKind::Longitude {
                phi: *phi,
                theta_start: *theta_end,
                theta_end: *theta_start,
            },
            SegmentKind::Modulated {
                base_theta,
                phi_start,
                phi_end,
                harmonics,
            } => SegmentKind::Modulated {
                base_theta: *base_theta,
                phi_start: *phi_end,
                phi_end: *phi_start,
                // sin(kπ(1−s)) = (−1)^(k+1) sin(kπs)
                harmonics: harmonics
                    .iter()
                    .enumerate()
                    .map(|(k, c)| if k % 2 == 0 { *c } else { -c })
                    .collect(),
            },
            SegmentKind::Parametric { theta, phi } => SegmentKind::Parametric {
                theta: theta.reversed(),
                phi: phi.reversed(),
            },
        };
        Self {
            kind,
            label: format!("reverse({})", self.label),
        }
    }

    /// Polar-angle extremes, sampled for curved segments.
    fn theta_range(&self) -> (f64, f64) {
        match &self.kind {
            SegmentKind::Latitude { theta, .. } => (*theta, *theta),
            SegmentKind::Longitude {
                theta_start,
                theta_end,
                ..
            } => (theta_start.min(*theta_end), theta_start.max(*theta_end)),
            _ => {
                let n = 2048;
                (0..=n)
                    .map(|k| self.point(k as f64 / n as f64).theta)
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| {
                        (lo.min(t), hi.max(t))
                    })
            }
        }
    }

    fn to_text(&self) -> String {
        match &self.kind {
            SegmentKind::Latitude {
                theta,
                phi_start,
                phi_end,
            } => format!("latitude({theta:?}, {phi_start:?}, {phi_end:?})"),
            SegmentKind::Longitude {
                phi,
                theta_start,
                theta_end,
            } => format!("longitude({phi:?}, {theta_start:?}, {theta_end:?})"),
            SegmentKind::Modulated {
                base_theta,
                phi_start,
                phi_end,
                harmonics,
            } => {
                let hs: Vec<String> = harmonics.iter().map(|h| format!("{h:?}")).collect();
                format!(
                    "modulated({base_theta:?}, {phi_start:?}, {phi_end:?}; {})",
                    hs.join(", ")
                )
            }
            SegmentKind::Parametric { theta, phi } => {
                let pts: Vec<String> = theta
                    .samples()
                    .iter()
                    .zip(phi.samples())
                    .map(|(t, p)| format!("{t:?} {p:?}"))
                    .collect();
                format!("parametric({})", pts.join("; "))
            }
        }
    }
}

fn lerp(a: f64, b: f64, s: f64) -> f64 {
    a + (b - a) * s
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpherePath {
    segments: Vec<Segment>,
    label: String,
}

impl SpherePath {
    /// Validates continuity at the junctions and `θ ∈ [0, π]`.
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let label = segments
            .iter()
            .map(|s| s.label.as_str())
            .collect::<Vec<_>>()
            .join(" + ");
        Self::with_label(segments, label)
    }

    pub fn with_label(segments: Vec<Segment>, label: impl Into<String>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidPath("path has no segments".into()));
        }
        for (k, seg) in segments.iter().enumerate() {
            let (lo, hi) = seg.theta_range();
            if !lo.is_finite() || !hi.is_finite() || lo < -JOIN_TOL || hi > PI + JOIN_TOL {
                return Err(Error::InvalidPath(format!(
                    "segment {k} leaves theta in [0, pi] (range {lo:.6}..{hi:.6})"
                )));
            }
        }
        for (k, pair) in segments.windows(2).enumerate() {
            let (a, b) = (pair[0].end(), pair[1].start());
            if (a.theta - b.theta).abs() > JOIN_TOL || (a.phi - b.phi).abs() > JOIN_TOL {
                return Err(Error::InvalidPath(format!(
                    "segments {k} and {} do not join: ({:.6}, {:.6}) vs ({:.6}, {:.6})",
                    k + 1,
                    a.theta,
                    a.phi,
                    b.theta,
                    b.phi
                )));
            }
        }
        Ok(Self {
            segments,
            label: label.into(),
        })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn start(&self) -> SpherePoint {
        self.segments[0].start()
    }

    pub fn end(&self) -> SpherePoint {
        self.segments[self.segments.len() - 1].end()
    }

    pub fn is_loop(&self) -> bool {
        self.start().same_orientation(&self.end(), JOIN_TOL)
    }

    /// Point at global parameter `s ∈ [0, 1]`; each segment occupies an equal
    /// share of `s`.
    pub fn point_at(&self, s: f64) -> SpherePoint {
        let (seg, local) = self.locate(s);
        self.segments[seg].point(local)
    }

    fn locate(&self, s: f64) -> (usize, f64) {
        let m = self.segments.len();
        let x = s.clamp(0.0, 1.0) * m as f64;
        let k = (x.floor() as usize).min(m - 1);
        (k, x - k as f64)
    }

    pub fn reversed(&self) -> Self {
        Self {
            segments: self.segments.iter().rev().map(Segment::reversed).collect(),
            label: format!("reverse({})", self.label),
        }
    }

    /// `self` followed by `next`; the two must join.
    pub fn concat(&self, next: &SpherePath) -> Result<Self> {
        let mut segments = self.segments.clone();
        segments.extend(next.segments.iter().cloned());
        Self::with_label(segments, format!("{} + {}", self.label, next.label))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for seg in &self.segments {
            out.push_str(&seg.to_text());
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut segments = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let seg = parse_segment(line).map_err(|msg| Error::PathParse { line: idx + 1, msg })?;
            segments.push(seg);
        }
        if segments.is_empty() {
            return Err(Error::PathParse {
                line: 0,
                msg: "no segments".into(),
            });
        }
        Self::new(segments)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidPath(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

impl fmt::Display for SpherePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// Full loop around the latitude `θ`, starting at `φ = 0`.
pub fn circle(theta: f64) -> SpherePath {
    SpherePath::with_label(
        vec![Segment::latitude(theta, 0.0, TAU)],
        format!("circle({theta:.6})"),
    )
    .expect("valid latitude")
}

/// The square in `(φ, θ)` through `(0, π/3) → (π/3, π/3) → (π/3, 2π/3) → (0, 2π/3)`
/// and back, along lines of constant latitude or longitude.
pub fn square() -> SpherePath {
    let a = PI / 3.0;
    let b = 2.0 * PI / 3.0;
    SpherePath::with_label(
        vec![
            Segment::latitude(a, 0.0, a),
            Segment::longitude(a, a, b),
            Segment::latitude(b, a, 0.0),
            Segment::longitude(0.0, b, a),
        ],
        "square",
    )
    .expect("valid square")
}

/// Meridian sweep at fixed `φ` from `theta_start` to `theta_end`.
pub fn longitude_sweep(phi: f64, theta_start: f64, theta_end: f64) -> SpherePath {
    SpherePath::new(vec![Segment::longitude(phi, theta_start, theta_end)]).expect("valid")
}

/// Stationary path: a single point held for the whole evolution.
pub fn stationary(theta: f64, phi: f64) -> SpherePath {
    SpherePath::with_label(vec![Segment::latitude(theta, phi, phi)], "stationary")
        .expect("valid point")
}

/// Named paths: `circle` (θ = π/3), `square`, `equator`, `longitude` (φ = 0,
/// θ from π/3 to 2π/3).
pub fn builtin(name: &str) -> Option<SpherePath> {
    match name {
        "circle" => Some(circle(PI / 3.0)),
        "square" => Some(square()),
        "equator" => Some(circle(PI / 2.0)),
        "longitude" => Some(longitude_sweep(0.0, PI / 3.0, 2.0 * PI / 3.0)),
        _ => None,
    }
}

pub const BUILTIN_NAMES: [&str; 4] = ["circle", "square", "equator", "longitude"];

/// A built-in name or a path file.
pub fn resolve(spec: &str) -> Result<SpherePath> {
    match builtin(spec) {
        Some(p) => Ok(p),
        None => SpherePath::load(Path::new(spec)),
    }
}

fn parse_segment(line: &str) -> std::result::Result<Segment, String> {
    let open = line.find('(').ok_or("expected '('")?;
    if !line.ends_with(')') {
        return Err("expected ')' at end of line".into());
    }
    let name = line[..open].trim();
    let body = &line[open + 1..line.len() - 1];
    let args = |s: &str| -> std::result::Result<Vec<f64>, String> {
        s.split(',').map(|a| eval_expr(a.trim())).collect()
    };
    match name {
        "latitude" | "longitude" => {
            let v = args(body)?;
            if v.len() != 3 {
                return Err(format!("{name} takes 3 arguments, got {}", v.len()));
            }
            Ok(if name == "latitude" {
                Segment::latitude(v[0], v[1], v[2])
            } else {
                Segment::longitude(v[0], v[1], v[2])
            })
        }
        "parametric" => {
            let mut pts = Vec::new();
            for item in body.split(';') {
                let nums: Vec<&str> = item.split_whitespace().collect();
                if nums.len() != 2 {
                    return Err(format!("expected 'theta phi' pair, got '{}'", item.trim()));
                }
                pts.push(SpherePoint::new(eval_expr(nums[0])?, eval_expr(nums[1])?));
            }
            Segment::parametric(&pts).map_err(|e| e.to_string())
        }
        "modulated" => {
            let (head, tail) = body
                .split_once(';')
                .ok_or("modulated needs '; c1, c2, ...' harmonics")?;
            let v = args(head)?;
            if v.len() != 3 {
                return Err(format!(
                    "modulated takes 3 leading arguments, got {}",
                    v.len()
                ));
            }
            let harmonics = if tail.trim().is_empty() {
                Vec::new()
            } else {
                args(tail)?
            };
            Ok(Segment::modulated(v[0], v[1], v[2], harmonics))
        }
        other => Err(format!("unknown segment kind '{other}'")),
    }
}

/// Evaluates `+ - * /`, parentheses, decimal literals and `pi`.
pub fn eval_expr(src: &str) -> std::result::Result<f64, String> {
    let mut p = ExprParser {
        chars: src.chars().filter(|c| !c.is_whitespace()).collect(),
        pos: 0,
    };
    let v = p.sum()?;
    if p.pos != p.chars.len() {
        return Err(format!("unexpected trailing input in '{src}'"));
    }
    if !v.is_finite() {
        return Err(format!("'{src}' is not finite"));
    }
    Ok(v)
}

struct ExprParser {
    chars: Vec<char>,
    pos: usize,
}

impl ExprParser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn sum(&mut self) -> std::result::Result<f64, String> {
        let mut v = self.product()?;
        while let Some(op) = self.peek() {
            match op {
                '+' => {
                    self.pos += 1;
                    v += self.product()?;
                }
                '-' => {
                    self.pos += 1;
                    v -= self.product()?;
                }
                _ => break,
            }
        }
        Ok(v)
    }

    fn product(&mut self) -> std::result::Result<f64, String> {
        let mut v = self.unary()?;
        while let Some(op) = self.peek() {
            match op {
                '*' => {
                    self.pos += 1;
                    v *= self.unary()?;
                }
                '/' => {
                    self.pos += 1;
                    v /= self.unary()?;
                }
                _ => break,
            }
        }
        Ok(v)
    }

    fn unary(&mut self) -> std::result::Result<f64, String> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> std::result::Result<f64, String> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let v = self.sum()?;
                if self.peek() != Some(')') {
                    return Err("unbalanced parenthesis".into());
                }
                self.pos += 1;
                Ok(v)
            }
            Some('p') => {
                if self.chars.get(self.pos + 1) == Some(&'i') {
                    self.pos += 2;
                    Ok(PI)
                } else {
                    Err("unknown identifier".into())
                }
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let start = self.pos;
                while let Some(c) = self.peek() {
                    let exp_sign = (c == '-' || c == '+')
                        && matches!(self.chars.get(self.pos - 1), Some('e') | Some('E'));
                    if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || exp_sign {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                let lit: String = self.chars[start..self.pos].iter().collect();
                lit.parse::<f64>()
                    .map_err(|e| format!("bad number '{lit}': {e}"))
            }
            Some(c) => Err(format!("unexpected '{c}'")),
            None => Err("unexpected end of expression".into()),
        }
    }
}
