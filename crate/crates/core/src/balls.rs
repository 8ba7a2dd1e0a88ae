//! Merging and exponential growth of families of disjoint closed balls, and the
//! resulting lower bound for the Dirichlet energy outside small balls.

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BallsError {
    #[error("the ball family is empty")]
    EmptyFamily,
    #[error("distance and content must be positive and the singular energy nonnegative")]
    NonpositiveGeometry,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ball {
    pub center: [f64; 2],
    pub radius: f64,
}

impl Ball {
    pub fn new(cx: f64, cy: f64, radius: f64) -> Self {
        Self { center: [cx, cy], radius }
    }

    pub fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    /// Gap between the boundaries; negative when overlapping.
    pub fn gap(&self, other: &Ball) -> f64 {
        dist(self.center, other.center) - self.radius - other.radius
    }

    /// Whether `other` lies inside `self`, up to a relative tolerance.
    pub fn contains(&self, other: &Ball, tol: f64) -> bool {
        dist(self.center, other.center) + other.radius <= self.radius + tol * self.radius.max(1.0)
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

pub type BallFamily = Vec<Ball>;

/// Merged family together with the input indices absorbed into each output ball.
#[derive(Clone, Debug, PartialEq)]
pub struct Merged {
    pub balls: BallFamily,
    pub members: Vec<Vec<usize>>,
}

fn merge_pair(a: &Ball, b: &Ball) -> Ball {
    let r = a.radius + b.radius;
    if r == 0.0 {
        return Ball { center: a.center, radius: 0.0 };
    }
    let c = [
        (a.radius * a.center[0] + b.radius * b.center[0]) / r,
        (a.radius * a.center[1] + b.radius * b.center[1]) / r,
    ];
    Ball { center: c, radius: r }
}

/// Repeatedly replaces the most overlapping pair (touching counts) by the ball
/// `B((r₁a₁ + r₂a₂)/(r₁ + r₂), r₁ + r₂)` until the family is disjoint.
/// Pairs whose gap is at most `slack·(r₁ + r₂)` are treated as touching.
pub fn merge_balls_with_slack(family: &[Ball], slack: f64) -> Merged {
    let mut balls: Vec<Ball> = family.to_vec();
    let mut members: Vec<Vec<usize>> = (0..family.len()).map(|i| vec![i]).collect();
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..balls.len() {
            for j in i + 1..balls.len() {
                let g = balls[i].gap(&balls[j]);
                if g <= slack * (balls[i].radius + balls[j].radius) && best.is_none_or(|(bg, _, _)| g < bg) {
                    best = Some((g, i, j));
                }
            }
        }
        let Some((_, i, j)) = best else { break };
        balls[i] = merge_pair(&balls[i], &balls[j]);
        balls.remove(j);
        let absorbed = members.remove(j);
        members[i].extend(absorbed);
        members[i].sort_unstable();
    }
    Merged { balls, members }
}

/// Merges intersecting balls until the family is pairwise disjoint.
pub fn merge_balls(family: &[Ball]) -> Result<BallFamily, BallsError> {
    if family.is_empty() {
        return Err(BallsError::EmptyFamily);
    }
    Ok(merge_balls_with_slack(family, 0.0).balls)
}

/// Sum of the diameters after merging; bounds the content of the union from above.
pub fn content_upper_bound(family: &[Ball]) -> f64 {
    merge_balls_with_slack(family, 0.0).balls.iter().map(Ball::diameter).sum()
}

/// One interval of the growth process on which the family only dilates.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthInterval {
    pub t_start: f64,
    pub t_end: f64,
    /// Family at `t_start`; at time `t` radii are multiplied by `exp(t - t_start)`.
    pub balls: BallFamily,
    /// For each ball, the indices of the original balls it contains.
    pub members: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthTrace {
    pub intervals: Vec<GrowthInterval>,
    pub merge_times: Vec<f64>,
}

impl GrowthTrace {
    /// Family at time `t`, clamped to the traced range. At a merge time this is the
    /// merged family.
    pub fn at(&self, t: f64) -> BallFamily {
        let iv = self
            .intervals
            .iter()
            .find(|iv| t < iv.t_end)
            .unwrap_or_else(|| self.intervals.last().expect("nonempty trace"));
        let t = t.clamp(iv.t_start, iv.t_end);
        let s = (t - iv.t_start).exp();
        iv.balls.iter().map(|b| Ball { center: b.center, radius: b.radius * s }).collect()
    }

    pub fn t_max(&self) -> f64 {
        self.intervals.last().map_or(0.0, |iv| iv.t_end)
    }
}

const TOUCH_SLACK: f64 = 1e-12;

/// Grows the family: on each interval radii dilate by `eᵗ` with fixed centres;
/// when two balls touch they are merged and growth continues.
pub fn growth_process(family: &[Ball], t_max: f64) -> Result<GrowthTrace, BallsError> {
    if family.is_empty() {
        return Err(BallsError::EmptyFamily);
    }
    let first = merge_balls_with_slack(family, 0.0);
    let mut balls = first.balls;
    let mut members = first.members;
    let mut t = 0.0;
    let mut intervals = Vec::new();
    let mut merge_times = Vec::new();
    loop {
        // next collision: |a - a'| = (r + r') e^{s}
        let mut next = f64::INFINITY;
        for i in 0..balls.len() {
            for j in i + 1..balls.len() {
                let rs = balls[i].radius + balls[j].radius;
                if rs > 0.0 {
                    let d = dist(balls[i].center, balls[j].center);
                    next = next.min(t + (d / rs).ln().max(0.0));
                }
            }
        }
        let t_end = next.min(t_max);
        intervals.push(GrowthInterval { t_start: t, t_end, balls: balls.clone(), members: members.clone() });
        if next > t_max {
            break;
        }
        let s = (t_end - t).exp();
        let grown: Vec<Ball> = balls.iter().map(|b| Ball { center: b.center, radius: b.radius * s }).collect();
        let merged = merge_balls_with_slack(&grown, TOUCH_SLACK);
        members = merged.members.iter().map(|m| m.iter().flat_map(|&k| members[k].iter().copied()).collect()).collect();
        for m in members.iter_mut() {
            m.sort_unstable();
        }
        balls = merged.balls;
        merge_times.push(t_end);
        t = t_end;
    }
    Ok(GrowthTrace { intervals, merge_times })
}

/// Lower bound `E_sg · log(dist / (2·content))` for the Dirichlet energy outside a
/// family of balls of total content `content` at distance `dist` from the boundary.
/// Negative values are vacuous.
pub fn dirichlet_lower_bound(singular_energy: f64, dist: f64, content: f64) -> Result<f64, BallsError> {
    if !(singular_energy >= 0.0 && dist > 0.0 && content > 0.0) {
        return Err(BallsError::NonpositiveGeometry);
    }
    if singular_energy == 0.0 {
        return Ok(0.0);
    }
    Ok(singular_energy * (dist / (2.0 * content)).ln())
}
