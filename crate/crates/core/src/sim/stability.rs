use crate::gait::LegId;
use crate::kinematics::LegModel;
use crate::robot::RobotSpec;

use super::RobotState;

const EPS: f64 = 1e-9;

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Counter-clockwise convex hull (monotone chain), collinear points dropped.
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// True when `p` lies strictly inside the convex polygon `hull` (CCW order).
pub fn strictly_inside_convex(hull: &[[f64; 2]], p: [f64; 2]) -> bool {
    if hull.len() < 3 {
        return false;
    }
    (0..hull.len()).all(|i| cross(hull[i], hull[(i + 1) % hull.len()], p) > EPS)
}

/// Support-polygon test: the body centre must project strictly inside the
/// convex hull of the stance feet, with at least three feet down.
pub fn static_stability(state: &RobotState, spec: &RobotSpec, leg: &LegModel) -> bool {
    if state.stance.len() < 3 {
        return false;
    }
    let feet: Vec<[f64; 2]> = state
        .stance
        .iter()
        .map(|id: LegId| {
            let [mx, my] = spec.mount(id);
            [mx + leg.foot(state.gait.phase(id)).x, my]
        })
        .collect();
    strictly_inside_convex(&convex_hull(&feet), [0.0, 0.0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hull_of_square_with_interior_point() {
        let h = convex_hull(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]]);
        assert_eq!(h.len(), 4);
        assert!(strictly_inside_convex(&h, [0.5, 0.5]));
        assert!(!strictly_inside_convex(&h, [1.0, 0.5]));
        assert!(!strictly_inside_convex(&h, [2.0, 0.5]));
    }

    #[test]
    fn collinear_points_have_no_interior() {
        let h = convex_hull(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]);
        assert!(!strictly_inside_convex(&h, [1.0, 1.0]));
    }
}
