//! Unit conventions.
//!
//! Energies are in meV and times in fs. The closed forms are written with
//! ħ = 1, so every product of an energy and a time goes through
//! [`UnitSystem::reduced_time`], which returns t/ħ in meV⁻¹.

/// ħ in meV·fs.
pub const HBAR_MEV_FS: f64 = 658.211_956_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    pub hbar_mev_fs: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self {
            hbar_mev_fs: HBAR_MEV_FS,
        }
    }
}

impl UnitSystem {
    /// t [fs] → t/ħ [meV⁻¹].
    #[inline]
    pub fn reduced_time(t_fs: f64) -> f64 {
        t_fs / HBAR_MEV_FS
    }

    /// t/ħ [meV⁻¹] → t [fs].
    #[inline]
    pub fn time_fs(reduced: f64) -> f64 {
        reduced * HBAR_MEV_FS
    }

    /// Lifetime ħ/E in fs for an energy in meV (e.g. τ_p = ħ/Γ).
    #[inline]
    pub fn lifetime_fs(energy_mev: f64) -> f64 {
        HBAR_MEV_FS / energy_mev
    }
}
