use super::{Band, BandPlan, MaskPair, SoftMask};
use crate::cues::{CueGrid, DEFAULT_EPSILON};
use crate::error::{Error, Result};
use crate::roomsim::Rir;
use crate::scalar::{wrap_phase, Complex, Real};

/// Gaussian kernel widths per fusion band, indexed by [`Band::index`].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TemplateWidths<T> {
    pub sigma_ipd_rad: [T; 3],
    pub sigma_ild_db: [T; 3],
}

impl<T: Real> Default for TemplateWidths<T> {
    fn default() -> Self {
        Self { sigma_ipd_rad: [T::PI() / T::lit(6.0); 3], sigma_ild_db: [T::lit(3.0); 3] }
    }
}

impl<T: Real> TemplateWidths<T> {
    pub fn uniform(sigma_ipd_rad: T, sigma_ild_db: T) -> Self {
        Self { sigma_ipd_rad: [sigma_ipd_rad; 3], sigma_ild_db: [sigma_ild_db; 3] }
    }

    fn validate(&self) -> Result<()> {
        if self.sigma_ipd_rad.iter().chain(&self.sigma_ild_db).any(|s| !(*s > T::zero() && s.is_finite())) {
            return Err(Error::InvalidConfig(format!("kernel widths must be positive: {self:?}")));
        }
        Ok(())
    }
}

/// Expected direct-path cues per one-sided bin for one source azimuth.
#[derive(Debug, Clone, PartialEq)]
pub struct CueTemplates<T> {
    pub ild_template_db: Vec<T>,
    pub ipd_template_rad: Vec<T>,
    pub widths: TemplateWidths<T>,
    pub azimuth_deg: T,
    pub plan: BandPlan,
}

impl<T: Real> CueTemplates<T> {
    pub fn bins(&self) -> usize {
        self.ild_template_db.len()
    }
}

fn transfer_at<T: Real>(taps: &[T], omega: f64) -> Complex<f64> {
    let mut acc = Complex::new(0.0, 0.0);
    for (n, &h) in taps.iter().enumerate() {
        acc += Complex::from_polar(h.to_f64_lossy(), -omega * n as f64);
    }
    acc
}

/// Cue templates from a direct-path RIR pair: ILD and IPD of `H_left / H_right` at each bin centre.
pub fn build_templates<T: Real>(
    left: &Rir<T>,
    right: &Rir<T>,
    plan: &BandPlan,
    widths: TemplateWidths<T>,
    azimuth_deg: T,
) -> Result<CueTemplates<T>> {
    if left.sample_rate_hz() != right.sample_rate_hz() {
        return Err(Error::RateMismatch { left: left.sample_rate_hz(), right: right.sample_rate_hz() });
    }
    if left.sample_rate_hz() != plan.sample_rate_hz() {
        return Err(Error::RateMismatch { left: left.sample_rate_hz(), right: plan.sample_rate_hz() });
    }
    widths.validate()?;
    let eps = DEFAULT_EPSILON;
    let (mut ild, mut ipd) = (Vec::with_capacity(plan.bins()), Vec::with_capacity(plan.bins()));
    for k in 0..plan.bins() {
        let omega = 2.0 * std::f64::consts::PI * k as f64 / plan.frame_len() as f64;
        let (hl, hr) = (transfer_at(left.taps(), omega), transfer_at(right.taps(), omega));
        ild.push(T::lit(20.0 * (hl.norm().max(eps) / hr.norm().max(eps)).log10()));
        ipd.push(T::lit((hl * hr.conj()).arg()));
    }
    Ok(CueTemplates { ild_template_db: ild, ipd_template_rad: ipd, widths, azimuth_deg, plan: plan.clone() })
}

/// Gaussian similarity of observed cues to the templates; returns `(ipd_masks, ild_masks)`.
pub fn cue_template_backend<T: Real>(cues: &CueGrid<T>, templates: &CueTemplates<T>) -> Result<(MaskPair<T>, MaskPair<T>)> {
    cues.ild_db.check_shape(cues.ipd_rad.shape())?;
    if cues.bins() != templates.bins() {
        return Err(Error::ShapeMismatch(format!("cue grid has {} bins, templates {}", cues.bins(), templates.bins())));
    }
    let band: Vec<Band> = (0..templates.bins())
        .map(|k| templates.plan.band_of(k).ok_or_else(|| Error::ShapeMismatch(format!("bin {k} outside band plan"))))
        .collect::<Result<_>>()?;
    let half = T::lit(0.5);
    let mut ipd_mask = cues.ipd_rad.clone();
    let mut ild_mask = cues.ild_db.clone();
    for m in 0..cues.frames() {
        for (k, v) in ipd_mask.frame_mut(m).iter_mut().enumerate() {
            let d = wrap_phase(*v - templates.ipd_template_rad[k]) / templates.widths.sigma_ipd_rad[band[k].index()];
            *v = (-half * d * d).exp();
        }
        for (k, v) in ild_mask.frame_mut(m).iter_mut().enumerate() {
            let d = (*v - templates.ild_template_db[k]) / templates.widths.sigma_ild_db[band[k].index()];
            *v = (-half * d * d).exp();
        }
    }
    Ok((
        MaskPair::from_direct(SoftMask::clamped(ipd_mask)),
        MaskPair::from_direct(SoftMask::clamped(ild_mask)),
    ))
}
