use dbar_core::boundary::dn_map_identity;
use dbar_core::forward::*;
use dbar_core::C64;

fn main() {
    for nb in [256usize, 384, 512] {
        let mesh = FemMesh::disc(nb, &[0.5]).unwrap();
        let sigma = Conductivity::two_layer(2.0, 0.5).unwrap();
        let t0 = std::time::Instant::now();
        let dn = assemble_dn_map(&sigma, 8, &mesh).unwrap();
        let dt = t0.elapsed().as_secs_f64();
        let mut worst = 0.0f64;
        for n in 1..=8i64 {
            let want = radial_dn_eigenvalue(&[0.5], &[2.0], n).unwrap();
            let rel = (dn.entry(n, n).re - want).abs() / want;
            if n <= 3 { println!("  nb={nb} n={n}: rel err {rel:.2e}"); }
            worst = worst.max(rel);
        }
        println!("nb={nb}: worst rel eig err |n|<=8: {worst:.3e}  nodes={} time={dt:.2}s", mesh.node_count());
        // difference decay check for rho=0.7 phantom
        if nb == 256 {
            let mesh7 = FemMesh::disc(nb, &[0.7]).unwrap();
            let sig7 = Conductivity::two_layer(2.0, 0.7).unwrap();
            let diff = dn_difference(&sig7, 16, &mesh7).unwrap();
            let lam1 = dn_map_identity(16);
            let _ = lam1;
            print!("  rho=0.7 diff diag: ");
            for n in 1..=13i64 {
                let want = radial_dn_eigenvalue(&[0.7], &[2.0], n).unwrap() - n as f64;
                let got = diff.entry(n, n).re;
                print!("{n}:{:.1e}/{:.1e} ", (got - want).abs(), want);
            }
            println!();
        }
        let _ = C64::new(0.0, 0.0);
    }
}
