//! MR×NR register tile: `acc = Σ_p a[p]·b[p]ᵀ` over packed micro-panels.
//!
//! The body is a plain loop over fixed-size arrays; the compiler keeps the
//! tile in vector registers. An AVX2/FMA instantiation is selected at run
//! time when the CPU supports it.

pub(crate) const MR: usize = 8;
pub(crate) const NR: usize = 6;

pub(crate) type Tile = [[f64; MR]; NR];

#[inline(always)]
fn body<const FMA: bool>(k: usize, a: &[f64], b: &[f64]) -> Tile {
    let mut acc: Tile = [[0.0; MR]; NR];
    let a = &a[..k * MR];
    let b = &b[..k * NR];
    for (ap, bp) in a.chunks_exact(MR).zip(b.chunks_exact(NR)) {
        let ap: &[f64; MR] = ap.try_into().unwrap();
        let bp: &[f64; NR] = bp.try_into().unwrap();
        for j in 0..NR {
            let bj = bp[j];
            for i in 0..MR {
                acc[j][i] = if FMA { ap[i].mul_add(bj, acc[j][i]) } else { acc[j][i] + ap[i] * bj };
            }
        }
    }
    acc
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2,fma")]
unsafe fn body_avx2(k: usize, a: &[f64], b: &[f64]) -> Tile {
    body::<true>(k, a, b)
}

fn has_avx2_fma() -> bool {
    #[cfg(target_arch = "x86_64")]
    {
        use std::sync::OnceLock;
        static DETECTED: OnceLock<bool> = OnceLock::new();
        *DETECTED.get_or_init(|| is_x86_feature_detected!("avx2") && is_x86_feature_detected!("fma"))
    }
    #[cfg(not(target_arch = "x86_64"))]
    {
        false
    }
}

/// `a` holds k groups of MR values, `b` holds k groups of NR values.
#[inline]
pub(crate) fn tile_product(k: usize, a: &[f64], b: &[f64]) -> Tile {
    #[cfg(target_arch = "x86_64")]
    if has_avx2_fma() {
        // SAFETY: the required CPU features were detected at run time.
        return unsafe { body_avx2(k, a, b) };
    }
    body::<false>(k, a, b)
}
