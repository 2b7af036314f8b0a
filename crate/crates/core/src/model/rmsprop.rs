use super::Mlp;

/// RMSProp:
/// `acc <- decay * acc + (1 - decay) * g^2`,
/// `p <- p - lr * g / (sqrt(acc) + eps)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RmsProp {
    pub lr: f64,
    pub decay: f64,
    pub eps: f64,
    acc: Vec<f64>,
}

impl RmsProp {
    pub fn new(num_params: usize, lr: f64) -> Self {
        RmsProp { lr, decay: 0.9, eps: 1e-8, acc: vec![0.0; num_params] }
    }

    pub fn for_model(mlp: &Mlp, lr: f64) -> Self {
        RmsProp::new(mlp.num_params(), lr)
    }

    pub fn accumulators(&self) -> &[f64] {
        &self.acc
    }

    pub fn step(&mut self, params: &mut Mlp, grads: &Mlp) {
        assert_eq!(params.num_params(), self.acc.len(), "optimizer shape mismatch");
        let (lr, decay, eps) = (self.lr, self.decay, self.eps);
        let mut acc = self.acc.iter_mut();
        for (p, g) in params.param_slices_mut().zip(grads.param_slices()) {
            for (pi, &gi) in p.iter_mut().zip(g) {
                let a = acc.next().unwrap();
                *a = decay * *a + (1.0 - decay) * gi * gi;
                *pi -= lr * gi / (a.sqrt() + eps);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(value: f64) -> Mlp {
        Mlp::unflatten(&[1, 1], &[value, 0.0]).unwrap()
    }

    #[test]
    fn zero_gradient_leaves_params() {
        let mut p = single(1.5);
        let mut opt = RmsProp::for_model(&p, 0.01);
        opt.step(&mut p, &single(0.0).clone());
        assert_eq!(p.flatten(), vec![1.5, 0.0]);
    }

    #[test]
    fn first_step_closed_form() {
        let g = 0.3;
        let mut p = single(0.0);
        let mut opt = RmsProp::for_model(&p, 0.01);
        opt.step(&mut p, &single(g));
        let want = -0.01 * g / (((1.0 - 0.9) * g * g).sqrt() + 1e-8);
        assert!((p.flatten()[0] - want).abs() < 1e-15);
    }

    #[test]
    fn constant_gradient_step_approaches_lr() {
        let mut p = single(0.0);
        let mut opt = RmsProp::for_model(&p, 0.01);
        let mut prev = 0.0;
        let mut step = 0.0;
        for _ in 0..500 {
            opt.step(&mut p, &single(2.0));
            let now = p.flatten()[0];
            step = prev - now;
            prev = now;
        }
        assert!((step - 0.01).abs() < 1e-6, "step {step}");
        assert!((opt.accumulators()[0] - 4.0).abs() < 1e-6);
    }
}
