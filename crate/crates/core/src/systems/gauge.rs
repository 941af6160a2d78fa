use crate::polyalg::Polynomial;

use super::SystemsError;

/// Vector potential `(A_x, A_y, A_z)`, polynomial in position only.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeChoice {
    components: [Polynomial; 3],
}

impl GaugeChoice {
    /// A potential with no field requirement; only position dependence is checked.
    pub fn from_components(components: [Polynomial; 3]) -> Result<Self, SystemsError> {
        if components.iter().any(Polynomial::involves_momenta) {
            return Err(SystemsError::Usage(
                "vector potential must not depend on momenta".into(),
            ));
        }
        let vars = components[0].vars();
        if components.iter().any(|c| c.vars() != vars) {
            return Err(SystemsError::Poly(crate::polyalg::PolyError::VarSetMismatch));
        }
        Ok(GaugeChoice { components })
    }

    /// A potential whose curl must reproduce `field` exactly.
    pub fn new(components: [Polynomial; 3], field: &[Polynomial; 3]) -> Result<Self, SystemsError> {
        let g = Self::from_components(components)?;
        if &g.curl()? != field {
            return Err(SystemsError::GaugeMismatch);
        }
        Ok(g)
    }

    pub fn components(&self) -> &[Polynomial; 3] {
        &self.components
    }

    /// `B_j = Σ ε_jkl ∂A_l/∂x_k`.
    pub fn curl(&self) -> Result<[Polynomial; 3], SystemsError> {
        curl(self)
    }

    /// `A + ∇χ`. The curl is unchanged.
    pub fn transform(&self, chi: &Polynomial) -> Result<Self, SystemsError> {
        gauge_transform(self, chi)
    }
}

pub fn curl(g: &GaugeChoice) -> Result<[Polynomial; 3], SystemsError> {
    let [ax, ay, az] = &g.components;
    Ok([
        az.diff_at(1).sub(&ay.diff_at(2))?,
        ax.diff_at(2).sub(&az.diff_at(0))?,
        ay.diff_at(0).sub(&ax.diff_at(1))?,
    ])
}

pub fn gauge_transform(g: &GaugeChoice, chi: &Polynomial) -> Result<GaugeChoice, SystemsError> {
    if chi.involves_momenta() {
        return Err(SystemsError::Usage(
            "gauge function must not depend on momenta".into(),
        ));
    }
    let mut components = g.components.clone();
    for (k, c) in components.iter_mut().enumerate() {
        *c = c.add(&chi.diff_at(k))?;
    }
    Ok(GaugeChoice { components })
}
