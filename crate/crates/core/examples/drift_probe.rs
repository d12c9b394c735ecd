use brown_core::brown_eval::*;
use brown_core::region::OmegaRegion;

fn main() {
    let (t, alpha) = (1.0, 0.5);
    let region = OmegaRegion::build(t, alpha, 2048).unwrap();
    for n in [101usize, 201] {
        let grid = GridSpec::new(-3.0, 3.0, n, -3.0, 3.0, n).unwrap();
        let field = laplacian_field(t, alpha, &grid, 2048).unwrap();
        let h = grid.h_re();
        // max |lap| bucketed by min(dist to 0, dist to boundary)
        let mut buckets = vec![0.0f64; 12];
        let mut global: (f64, f64, f64) = (0.0, 0.0, 0.0);
        for idx in 0..grid.len() {
            let l = field.laplacian[idx];
            if !l.is_finite() { continue; }
            let lam = grid.node(idx % n, idx / n);
            let d0 = lam.norm();
            let db = region.curve.points.iter().map(|p| (p - lam).norm()).fold(f64::INFINITY, f64::min);
            let d = d0.min(db);
            let b = ((d / 0.1) as usize).min(11);
            buckets[b] = buckets[b].max(l.abs());
            if l.abs() > global.0 { global = (l.abs(), d0, db); }
        }
        println!("h={h:.3}: worst |lap|={:.3e} at d0={:.3} db={:.3}", global.0, global.1, global.2);
        for (b, v) in buckets.iter().enumerate() {
            if *v > 0.0 { println!("  d in [{:.1},{:.1}): max {:.3e}", b as f64 * 0.1, (b+1) as f64 * 0.1, v); }
        }
    }
}
