//! The three two-site clouds separating the classes `ℬ ⊂ 𝒫 ⊂ ℛ ⊂ 𝒮_1`.

use super::GalleryInstance;
use crate::cloud_algebra::{Cloud, Marker};
use crate::error::Result;
use crate::io::Instance;
use crate::kernel_core::{Kernel, SiteSpace};
use crate::scalar::Scalar;

/// Markers charged with weight 1 by the cloud in `𝒫` but not in `ℬ`.
pub const P_NOT_B_MARKERS: [&str; 6] = ["xy", "xxx", "xxy", "yx", "yyx", "yyy"];

/// Markers charged with weight 1 by the cloud in `ℛ` but not in `𝒫`.
///
/// Dropping `yyx` would leave a cloud outside both `ℛ` and `𝒮_1`; with it
/// the cloud has norm 1, lies in `ℛ`, and fails `𝒫` at `(xyx, xx)`.
pub const R_NOT_P_MARKERS: [&str; 8] = ["xx", "xyxx", "xyxy", "xyy", "yxx", "yxy", "yyx", "yyy"];

/// Markers charged with weight 1 by the cloud in `𝒮_1` but not in `ℛ`.
pub const S1_NOT_R_MARKERS: [&str; 4] = ["xx", "xyx", "xyy", "y"];

/// The space `{x, y}`.
pub fn xy_space() -> SiteSpace {
    SiteSpace::new(["x", "y"]).expect("two distinct names")
}

/// The cloud with weight 1 on each marker spelled as a string over
/// single-character site names.
pub fn unit_cloud<S: Scalar>(space: &SiteSpace, markers: &[&str]) -> Result<Cloud<S>> {
    let entries = markers
        .iter()
        .map(|m| {
            let names: Vec<String> = m.chars().map(String::from).collect();
            Ok((Marker::from_names(space, &names)?, S::one()))
        })
        .collect::<Result<Vec<_>>>()?;
    Cloud::finite(space, entries)
}

/// The figure cloud of a family name.
pub fn figure_cloud<S: Scalar>(family: &str) -> Option<Result<Cloud<S>>> {
    let markers: &[&str] = match family {
        "cloud_P_not_B" => &P_NOT_B_MARKERS,
        "cloud_R_not_P" => &R_NOT_P_MARKERS,
        "cloud_S1_not_R" => &S1_NOT_R_MARKERS,
        _ => return None,
    };
    Some(unit_cloud(&xy_space(), markers))
}

pub(super) fn build(family: &str, caption: &str) -> Result<GalleryInstance> {
    let space = xy_space();
    let cloud = figure_cloud::<f64>(family).expect("known family")?;
    let mut inst = Instance::new(Kernel::zero(&space));
    inst.cloud = Some(cloud);
    Ok(GalleryInstance::new(family, inst, format!("exact two-site cloud ({caption}); no truncation")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloud_algebra::classify;
    use crate::scalar::Dyadic;

    #[test]
    fn figure_clouds_classify_as_captioned() {
        let p = classify(&figure_cloud::<Dyadic>("cloud_P_not_B").unwrap().unwrap(), None).unwrap();
        assert!(p.in_p && p.in_r && p.in_s);
        assert_eq!(p.norm, 1.0);
        let r = classify(&figure_cloud::<Dyadic>("cloud_R_not_P").unwrap().unwrap(), None).unwrap();
        assert!(r.in_r && !r.in_p);
        let w = r.p_witness.unwrap();
        assert_eq!((w.marker.concat(), w.other.concat()), ("xyx".to_string(), "xx".to_string()));
        assert_eq!(r.norm, 1.0);
        let s = classify(&figure_cloud::<Dyadic>("cloud_S1_not_R").unwrap().unwrap(), None).unwrap();
        assert!(s.in_s && !s.in_r);
        assert_eq!(s.s_value, Some(1.0));
        assert_eq!(s.r_witness.unwrap().concat(), "xy");
    }
}
