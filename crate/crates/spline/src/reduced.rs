use crate::knots::KnotVector;
use crate::tensor::SplineSpace;
use isoshell_core::error::{Error, Result};

/// Degree `p-2` space obtained by dropping the first and last two knots of `kv`.
pub fn build_reduced_space(kv: &KnotVector) -> Result<SplineSpace> {
    let p = kv.degree();
    if p < 2 {
        return Err(Error::UnsupportedDegree(p));
    }
    let k = kv.knots();
    let reduced = KnotVector::new(k[2..k.len() - 2].to_vec(), p - 2)?;
    Ok(SplineSpace::curve(reduced))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_to_constants() {
        let kv = KnotVector::from_breakpoints(2, &[0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]);
        let r = build_reduced_space(&kv).unwrap();
        assert_eq!(r.dir(0).degree(), 0);
        assert_eq!(r.dir(0).knots(), &[0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]);
        assert_eq!(r.num_basis(), 3);
    }

    #[test]
    fn cubic_to_linear() {
        let kv = KnotVector::new(vec![0., 0., 0., 0., 0.5, 1., 1., 1., 1.], 3).unwrap();
        let r = build_reduced_space(&kv).unwrap();
        assert_eq!(r.dir(0).knots(), &[0.0, 0.0, 0.5, 1.0, 1.0]);
        assert_eq!(r.dir(0).degree(), 1);
        assert_eq!(r.num_basis(), 3);
    }

    #[test]
    fn single_element() {
        let r = build_reduced_space(&KnotVector::uniform(2, 1)).unwrap();
        assert_eq!(r.num_basis(), 1);
    }

    #[test]
    fn linear_rejected() {
        assert!(matches!(build_reduced_space(&KnotVector::uniform(1, 3)), Err(Error::UnsupportedDegree(1))));
    }
}
