//! Solver tuning. The balance between "few edges relaxed one by one" and
//! "few matrix products" hangs on one exponent t: vertices keep at most
//! ceil(n^(1-t)) cheap edges, everything denser goes through the counting
//! products. t defaults to (3 - w)/2 where w is the exponent the active
//! multiplication kernel effectively realizes.

use crate::boolmat::MulKernel;

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub kernel: MulKernel,
    /// Overrides the kernel's effective exponent when set.
    pub omega_eff: Option<f64>,
    /// Overrides the derived t when set; clamped to [0, 1].
    pub t_param: Option<f64>,
    /// Recompute every live counting product at teardown and compare.
    /// Expensive; meant for tests and debugging runs.
    pub check_products: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            kernel: MulKernel::Packed,
            omega_eff: None,
            t_param: None,
            check_products: false,
        }
    }
}

impl SolverConfig {
    pub fn omega(&self) -> f64 {
        self.omega_eff.unwrap_or_else(|| self.kernel.effective_exponent())
    }

    pub fn t(&self) -> f64 {
        let t = self.t_param.unwrap_or((3.0 - self.omega()) / 2.0);
        t.clamp(0.0, 1.0)
    }

    /// Degree threshold ceil(n^(1-t)), at least 1. With the packed kernel's
    /// w = 3 this is n itself: every vertex is low degree and the solver
    /// degenerates into the plain bucket sweep, which is correct, just not
    /// subcubic.
    pub fn degree_cap(&self, n: u32) -> u32 {
        if n == 0 {
            return 1;
        }
        let cap = libm::ceil(libm::pow(n as f64, 1.0 - self.t())) as u32;
        cap.max(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_the_kernel() {
        let mut cfg = SolverConfig::default();
        assert_eq!(cfg.t(), 0.0);
        assert_eq!(cfg.degree_cap(512), 512);
        cfg.kernel = MulKernel::Strassen;
        let t = cfg.t();
        assert!((t - (3.0 - 7f64.log2()) / 2.0).abs() < 1e-12);
        // 512^(1 - 0.0963...) = 512^0.9036... ~ 280.74
        assert_eq!(cfg.degree_cap(512), 281);
    }

    #[test]
    fn explicit_t_wins() {
        let cfg = SolverConfig { t_param: Some(0.5), ..SolverConfig::default() };
        assert_eq!(cfg.degree_cap(100), 10);
        assert_eq!(cfg.degree_cap(101), 11);
        assert_eq!(cfg.degree_cap(0), 1);
        let wild = SolverConfig { t_param: Some(7.0), ..SolverConfig::default() };
        assert_eq!(wild.t(), 1.0);
        assert_eq!(wild.degree_cap(1000), 1);
    }

    #[test]
    fn explicit_omega_changes_t() {
        let cfg = SolverConfig { omega_eff: Some(2.0), ..SolverConfig::default() };
        assert_eq!(cfg.t(), 0.5);
    }
}
