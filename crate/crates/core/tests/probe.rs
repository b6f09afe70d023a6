use std::time::Instant;

use dhvol_core::polytope::{Polytope, PolytopeKind};
use dhvol_core::volume::{self, mu_u_eps, EpsilonLadder, QuadratureConfig};

#[test]
#[ignore]
fn probe_mapped_disk_rungs() {
    let e = vec![
        0.9430069230769231,
        0.6093333333333334,
        0.38666666666666666,
        1.1698135897435897,
    ];
    let p = Polytope::from_normals(3, &[e], PolytopeKind::Type1).unwrap();
    let cfg = QuadratureConfig { abs_tol: 5e-4, ..QuadratureConfig::default() };
    for eps in [0.1, 0.05, 0.025, 0.0125, 0.00625, 0.003125, 0.0015625, 0.00078125] {
        let t0 = Instant::now();
        let r = mu_u_eps(&p, eps, &cfg);
        println!("eps {eps:.6}: {r:?} in {:?}", t0.elapsed());
    }
}

#[test]
#[ignore]
fn probe_mapped_disk_volume() {
    let e = vec![
        0.9430069230769231,
        0.6093333333333334,
        0.38666666666666666,
        1.1698135897435897,
    ];
    let p = Polytope::from_normals(3, &[e], PolytopeKind::Type1).unwrap();
    let cfg = QuadratureConfig { abs_tol: 5e-4, ..QuadratureConfig::default() };
    let ladder = EpsilonLadder { eps0: 0.00625, ratio: 0.5, count: 4 };
    let t0 = Instant::now();
    let r = volume::volume(&p, &cfg, &ladder);
    println!("volume: {r:?} in {:?}", t0.elapsed());
}
