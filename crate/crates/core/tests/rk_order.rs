use lagrem::rk::integrate_with;
use lagrem::{integrate, ButcherTableau};

/// Rooted tree stored as the sorted indices of its children in a shared list.
struct Forest {
    children: Vec<Vec<usize>>,
    order: Vec<usize>,
}

impl Forest {
    /// All rooted trees with up to `max_order` vertices.
    fn up_to(max_order: usize) -> Forest {
        let mut f = Forest {
            children: vec![vec![]],
            order: vec![1],
        };
        for n in 2..=max_order {
            let mut found = Vec::new();
            f.multisets(n - 1, 0, &mut Vec::new(), &mut found);
            for kids in found {
                f.children.push(kids);
                f.order.push(n);
            }
        }
        f
    }

    /// Non-decreasing index lists of existing trees whose orders sum to `left`.
    fn multisets(&self, left: usize, min: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for t in min..self.children.len() {
            if self.order[t] <= left {
                cur.push(t);
                self.multisets(left - self.order[t], t, cur, out);
                cur.pop();
            }
        }
    }

    fn density(&self, t: usize) -> f64 {
        self.order[t] as f64
            * self.children[t]
                .iter()
                .map(|&c| self.density(c))
                .product::<f64>()
    }

    /// Stage vector of the elementary weight: u_i = prod_children (A u_child)_i.
    fn stage_weights(&self, tab: &ButcherTableau, t: usize) -> Vec<f64> {
        let s = tab.stages();
        let mut u = vec![1.0; s];
        for &c in &self.children[t] {
            let uc = self.stage_weights(tab, c);
            for (ui, row) in u.iter_mut().zip(&tab.a) {
                *ui *= row.iter().zip(&uc).map(|(a, v)| a * v).sum::<f64>();
            }
        }
        u
    }
}

#[test]
fn tree_counts() {
    let f = Forest::up_to(7);
    let counts: Vec<usize> = (1..=7)
        .map(|n| f.order.iter().filter(|&&o| o == n).count())
        .collect();
    assert_eq!(counts, [1, 1, 2, 4, 9, 20, 48]);
}

#[test]
fn fehlberg7_satisfies_order_conditions_through_seven() {
    let tab = ButcherTableau::fehlberg7();
    let f = Forest::up_to(7);
    for t in 0..f.children.len() {
        let phi: f64 = tab
            .b
            .iter()
            .zip(f.stage_weights(&tab, t))
            .map(|(b, u)| b * u)
            .sum();
        let want = 1.0 / f.density(t);
        assert!(
            (phi - want).abs() <= 1e-13,
            "tree {t} (order {}): {phi} vs {want}",
            f.order[t]
        );
    }
}

#[test]
fn fehlberg7_is_not_order_eight() {
    let tab = ButcherTableau::fehlberg7();
    let f = Forest::up_to(8);
    let worst = (0..f.children.len())
        .filter(|&t| f.order[t] == 8)
        .map(|t| {
            let phi: f64 = tab
                .b
                .iter()
                .zip(f.stage_weights(&tab, t))
                .map(|(b, u)| b * u)
                .sum();
            (phi - 1.0 / f.density(t)).abs()
        })
        .fold(0.0, f64::max);
    assert!(worst > 1e-6, "{worst}");
}

fn log2_slope(ns: &[usize], errs: &[f64]) -> f64 {
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).log2()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.log2()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    -sxy / sxx
}

#[test]
fn exponential_growth_converges_at_order_seven() {
    // Larger n leaves only rounding error on [0, 1].
    let ns = [4, 8, 16];
    let errs: Vec<f64> = ns
        .iter()
        .map(|&n| (integrate(|_, y| Ok(y), 0.0, 1.0, 1.0, n).unwrap().values[n] - 1f64.exp()).abs())
        .collect();
    let slope = log2_slope(&ns, &errs);
    assert!((slope - 7.0).abs() <= 0.3, "slope {slope}, errors {errs:?}");
}

#[test]
fn nonlinear_problem_converges_at_order_seven() {
    // y' = -2 x y^2, y(0) = 1 has y = 1/(1 + x^2)
    let ns = [16, 32, 64];
    let errs: Vec<f64> = ns
        .iter()
        .map(|&n| {
            let sol = integrate(|x, y| Ok(-2.0 * x * y * y), 0.0, 1.0, 4.0, n).unwrap();
            (sol.values[n] - 1.0 / 17.0).abs()
        })
        .collect();
    let slope = log2_slope(&ns, &errs);
    assert!((slope - 7.0).abs() <= 0.5, "slope {slope}, errors {errs:?}");
}

#[test]
fn forward_euler_tableau_is_first_order() {
    let euler = ButcherTableau {
        c: vec![0.0],
        a: vec![vec![]],
        b: vec![1.0],
        order: 1,
    };
    euler.validate().unwrap();
    let ns = [64, 128, 256];
    let errs: Vec<f64> = ns
        .iter()
        .map(|&n| {
            (integrate_with(&euler, |_, y| Ok(y), 0.0, 1.0, 1.0, n)
                .unwrap()
                .values[n]
                - 1f64.exp())
            .abs()
        })
        .collect();
    assert!((log2_slope(&ns, &errs) - 1.0).abs() <= 0.1);
}
