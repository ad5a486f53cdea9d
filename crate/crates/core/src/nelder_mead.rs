//! Box-constrained Nelder–Mead minimization.

#[derive(Debug, Clone)]
pub struct NmOptions {
    pub max_iter: usize,
    /// Stop once the largest vertex distance from the best vertex drops below this.
    pub min_diameter: f64,
    /// Initial edge length as a fraction of each box side.
    pub step_frac: f64,
}

impl Default for NmOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            min_diameter: 1e-8,
            step_frac: 0.1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NmResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

fn project(x: &mut [f64], lo: &[f64], hi: &[f64]) {
    for ((xi, l), h) in x.iter_mut().zip(lo).zip(hi) {
        *xi = xi.clamp(*l, *h);
    }
}

fn diameter(simplex: &[Vec<f64>]) -> f64 {
    let best = &simplex[0];
    simplex[1..]
        .iter()
        .map(|v| v.iter().zip(best).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max)
}

/// Minimizes `f` over the box `[lo, hi]` starting from `x0`. Trial points
/// are projected onto the box. A simplex on which `f` is exactly constant is
/// treated as converged.
pub fn minimize<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], lo: &[f64], hi: &[f64], opts: &NmOptions) -> NmResult {
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64]| {
        evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut start = x0.to_vec();
    project(&mut start, lo, hi);
    let mut simplex = vec![start.clone()];
    for i in 0..n {
        let mut v = start.clone();
        let step = opts.step_frac * (hi[i] - lo[i]);
        // step inward when the start sits on the upper face
        v[i] = if v[i] + step <= hi[i] { v[i] + step } else { v[i] - step };
        project(&mut v, lo, hi);
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();
    let mut iter = 0;
    loop {
        // sort ascending, stable so ties keep their order
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = idx.iter().map(|&i| simplex[i].clone()).collect();
        values = idx.iter().map(|&i| values[i]).collect();
        if iter >= opts.max_iter || diameter(&simplex) < opts.min_diameter || values[0] == values[n] {
            break;
        }
        iter += 1;
        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            let mut p: Vec<f64> = centroid.iter().zip(&simplex[n]).map(|(c, w)| c + t * (c - w)).collect();
            project(&mut p, lo, hi);
            p
        };
        let xr = along(1.0);
        let fr = eval(&xr);
        if fr < values[0] {
            let xe = along(2.0);
            let fe = eval(&xe);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[n] {
            let xc = along(0.5);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = along(-0.5);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < values[n].min(fr) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        // shrink toward the best vertex
        for i in 1..=n {
            let mut p: Vec<f64> = simplex[0].iter().zip(&simplex[i]).map(|(b, v)| b + 0.5 * (v - b)).collect();
            project(&mut p, lo, hi);
            values[i] = eval(&p);
            simplex[i] = p;
        }
    }
    NmResult {
        x: simplex[0].clone(),
        value: values[0],
        iterations: iter,
        evaluations: evals,
    }
}
