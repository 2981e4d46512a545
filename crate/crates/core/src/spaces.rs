//! Hilbert spaces and their elementary operators.
//!
//! Two finite-dimensional spaces appear throughout: a single bosonic mode
//! truncated at `cutoff` photons ([`FockSpace`], dimension `cutoff + 1`) and
//! a spin of size `s` ([`SpinSpace`], dimension `2s + 1`). Both are cheap
//! value types; the operator builders below are pure functions of the
//! dimension, so results can be built where needed and shared freely across
//! threads.
//!
//! The spin space additionally carries the basis change to the `s_x`
//! eigenbasis ([`SpinSpace::x_basis`]), which is where the correspondence
//! with the oscillator lives: the `n`-th Fock level maps onto the `s_x`
//! eigenvector with eigenvalue `s - n`. Eigenvector phases are pinned by an
//! explicit convention (see `x_basis`) so that overlaps between oscillator
//! and spin ground states are reproducible, not up-to-a-phase.

use crate::error::{Error, Result};
use crate::qmatrix::{herm_eig, vdot, vec_norm, OperatorMatrix, DEFAULT_HERMITICITY_TOL};
use crate::C64;

/// Single bosonic mode truncated at `cutoff` photons; states `|0>..|cutoff>`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct FockSpace {
    cutoff: usize,
}

impl FockSpace {
    /// Space keeping photon numbers `0..=cutoff`.
    ///
    /// Panics if `cutoff < 2`: the models need at least the two-photon
    /// states the pump couples to.
    pub fn new(cutoff: usize) -> Self {
        assert!(cutoff >= 2, "Fock cutoff must be at least 2");
        FockSpace { cutoff }
    }

    /// Highest retained photon number.
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Matrix dimension `cutoff + 1`.
    pub fn dim(&self) -> usize {
        self.cutoff + 1
    }

    /// Annihilation operator `a`, with `a[n-1, n] = sqrt(n)`.
    pub fn annihilation(&self) -> OperatorMatrix {
        let mut m = OperatorMatrix::zeros(self.dim());
        for n in 1..self.dim() {
            m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
        }
        m
    }

    /// Creation operator `a^dag`.
    pub fn creation(&self) -> OperatorMatrix {
        self.annihilation().adjoint()
    }

    /// Photon-number operator `n = a^dag a`, diagonal `0..=cutoff`.
    pub fn number(&self) -> OperatorMatrix {
        OperatorMatrix::from_real_diag(&(0..self.dim()).map(|n| n as f64).collect::<Vec<_>>())
    }

    /// Photon-number parity `(-1)^n`.
    pub fn parity(&self) -> OperatorMatrix {
        OperatorMatrix::from_real_diag(
            &(0..self.dim())
                .map(|n| if n % 2 == 0 { 1.0 } else { -1.0 })
                .collect::<Vec<_>>(),
        )
    }

    /// Quadrature operator `X = (a^dag + a) / 2`.
    pub fn quadrature_op(&self) -> OperatorMatrix {
        let mut m = self.annihilation();
        let adag = self.creation();
        m.scaled_add(C64::new(1.0, 0.0), &adag);
        m.scale(C64::new(0.5, 0.0));
        m
    }

    /// Vacuum state `|0>`.
    pub fn vacuum(&self) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); self.dim()];
        v[0] = C64::new(1.0, 0.0);
        v
    }

    /// Coherent state `|alpha>`, renormalized after truncation.
    ///
    /// Amplitudes are generated by the stable recursion
    /// `c_{n+1} = c_n * alpha / sqrt(n + 1)` and normalized at the end,
    /// which avoids factorial overflow entirely. Logs a warning when
    /// `|alpha|^2 > cutoff / 4`, where the truncated tail stops being
    /// negligible.
    pub fn coherent_state(&self, alpha: C64) -> Vec<C64> {
        let nbar = alpha.norm_sqr();
        if nbar > self.cutoff as f64 / 4.0 {
            log::warn!(
                "coherent state with |alpha|^2 = {nbar:.3} in a cutoff-{} space; \
                 truncation error may be significant",
                self.cutoff
            );
        }
        let mut v = vec![C64::new(0.0, 0.0); self.dim()];
        v[0] = C64::new(1.0, 0.0);
        for n in 0..self.cutoff {
            v[n + 1] = v[n] * alpha / C64::new(((n + 1) as f64).sqrt(), 0.0);
        }
        let norm = vec_norm(&v);
        for z in &mut v {
            *z /= norm;
        }
        v
    }
}

/// Spin of size `s` (integer or half-integer), basis `|s, m>` ordered by
/// descending magnetic quantum number `m = s, s-1, ..., -s`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct SpinSpace {
    twice_s: u32,
}

impl SpinSpace {
    /// Space for spin size `s`; rejects values that are not a positive
    /// integer or half-integer.
    pub fn new(s: f64) -> Result<Self> {
        let twice = 2.0 * s;
        if !(s > 0.0) || twice.fract() != 0.0 || twice > u32::MAX as f64 {
            return Err(Error::InvalidValue {
                key: "s".into(),
                message: format!("spin size must be a positive integer or half-integer, got {s}"),
            });
        }
        Ok(SpinSpace {
            twice_s: twice as u32,
        })
    }

    /// Space from `2s` directly (always valid for `2s >= 1`).
    pub fn from_twice_s(twice_s: u32) -> Self {
        assert!(twice_s >= 1, "spin size must be positive");
        SpinSpace { twice_s }
    }

    /// Spin size `s`.
    pub fn s(&self) -> f64 {
        self.twice_s as f64 / 2.0
    }

    /// `2s` as an exact integer.
    pub fn twice_s(&self) -> u32 {
        self.twice_s
    }

    /// Matrix dimension `2s + 1`.
    pub fn dim(&self) -> usize {
        self.twice_s as usize + 1
    }

    /// Magnetic quantum number of basis index `k`: `m_k = s - k`.
    fn m(&self, k: usize) -> f64 {
        self.s() - k as f64
    }

    /// `s_z`, diagonal `s, s-1, ..., -s`.
    pub fn sz(&self) -> OperatorMatrix {
        OperatorMatrix::from_real_diag(&(0..self.dim()).map(|k| self.m(k)).collect::<Vec<_>>())
    }

    /// Raising operator `s_+` with
    /// `<s, m+1| s_+ |s, m> = sqrt(s(s+1) - m(m+1))`.
    pub fn s_plus(&self) -> OperatorMatrix {
        let s = self.s();
        let mut m = OperatorMatrix::zeros(self.dim());
        for k in 1..self.dim() {
            let mk = self.m(k);
            m[(k - 1, k)] = C64::new((s * (s + 1.0) - mk * (mk + 1.0)).sqrt(), 0.0);
        }
        m
    }

    /// Lowering operator `s_- = (s_+)^dag`.
    pub fn s_minus(&self) -> OperatorMatrix {
        self.s_plus().adjoint()
    }

    /// `s_x = (s_+ + s_-) / 2`.
    pub fn sx(&self) -> OperatorMatrix {
        let mut m = self.s_plus();
        m.scaled_add(C64::new(1.0, 0.0), &self.s_minus());
        m.scale(C64::new(0.5, 0.0));
        m
    }

    /// `s_y = (s_+ - s_-) / 2i`.
    pub fn sy(&self) -> OperatorMatrix {
        let mut m = self.s_plus();
        m.scaled_add(C64::new(-1.0, 0.0), &self.s_minus());
        m.scale(C64::new(0.0, -0.5));
        m
    }

    /// Basis change to the `s_x` eigenbasis.
    ///
    /// Column `n` is the normalized eigenvector `|s - n, s>_x` of `s_x` with
    /// eigenvalue `s - n` (descending order, mirroring how Fock level `n`
    /// maps onto it). Phases are fixed deterministically:
    ///
    /// * column 0 (the maximal eigenvector, whose amplitudes never vanish)
    ///   has a real positive first component;
    /// * each next column's phase makes `<x_{n+1}| s_z |x_n>` real positive,
    ///   mirroring the phase convention `<n+1| a^dag |n> > 0` of the Fock
    ///   ladder. The magnitude of that element is
    ///   `sqrt((n+1)(2s - n)) / 2`, nonzero for every finite `s`, which the
    ///   construction asserts.
    pub fn x_basis(&self) -> OperatorMatrix {
        let dim = self.dim();
        let eig = herm_eig(&self.sx(), DEFAULT_HERMITICITY_TOL)
            .expect("s_x is Hermitian by construction");
        // Reverse to descending eigenvalue order.
        let mut u = OperatorMatrix::from_fn(dim, |i, k| eig.vectors[(i, dim - 1 - k)]);
        // Anchor the maximal eigenvector: first component real positive.
        let anchor = u[(0, 0)];
        assert!(
            anchor.norm() > 1e-12,
            "maximal s_x eigenvector has a vanishing leading component"
        );
        let phase = anchor / anchor.norm();
        for i in 0..dim {
            u[(i, 0)] /= phase;
        }
        // Chain the remaining phases through the s_z ladder elements.
        let sz = self.sz();
        for n in 0..dim - 1 {
            let col_n = u.column(n);
            let col_next = u.column(n + 1);
            let t = vdot(&col_next, &sz.apply(&col_n));
            assert!(
                t.norm() > 1e-12,
                "s_z ladder element between x-eigenvectors {n} and {} vanished",
                n + 1
            );
            let phase = t / t.norm();
            for i in 0..dim {
                u[(i, n + 1)] *= phase;
            }
        }
        u
    }

    /// Alternating-sign operator in the `s_x` eigenbasis:
    /// `U diag(+1, -1, +1, ...) U^dag` with `U` from [`SpinSpace::x_basis`].
    ///
    /// This is the spin image of the photon-number parity `(-1)^n` under the
    /// level correspondence `|n> <-> |s - n, s>_x`: it commutes with `s_x`
    /// and flips `s_y` and `s_z`. Drive-free spin models conserve it, which
    /// makes it the right symmetry label for their quasi-degenerate ground
    /// doublets.
    pub fn x_parity(&self) -> OperatorMatrix {
        let u = self.x_basis();
        let dim = self.dim();
        let mut signed = u.clone();
        for n in 0..dim {
            if n % 2 == 1 {
                for i in 0..dim {
                    signed[(i, n)] *= -1.0;
                }
            }
        }
        &signed * &u.adjoint()
    }

    /// Spin coherent state tipped by `theta` from the `+x` axis toward `+z`:
    /// `exp(i theta s_y) |s, s>_x`, so `<s_x> = s cos(theta)` and
    /// `<s_z> = s sin(theta)`.
    pub fn spin_coherent(&self, theta: f64) -> Vec<C64> {
        let g = C64::new(0.0, theta) * &self.sy();
        let rot = crate::qmatrix::unitary_exp(&g).expect("i*theta*s_y is anti-Hermitian");
        rot.apply(&self.x_basis().column(0))
    }
}
