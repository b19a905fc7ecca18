//! SVD pseudoinverse with numerical rank, projectors and the perturbation lemma.

use mgn::linalg::*;
use rand::SeedableRng;

fn main() {
    let a = Matrix::from_row_slice(3, 4, &[1.0, 2.0, 0.0, 1.0, 2.0, 4.0, 0.0, 2.0, 0.0, 1.0, 1.0, 0.0]);
    let d = decompose(&a, DEFAULT_RANK_TOL_FACTOR).unwrap();
    println!("singular values {:?}, rank {}", d.singular_values, d.rank());
    let x = d.pinv();
    println!("A^+ = {x:.6}");
    let r = penrose_residuals(&a, &x);
    println!("Penrose residuals {:.1e} {:.1e} {:.1e} {:.1e}", r.axa, r.xax, r.ax_symmetric, r.xa_symmetric);
    println!("projector residual {:.1e}", projector_residual(&d));

    let wide = Matrix::from_row_slice(2, 3, &[1.0, 0.0, 2.0, 0.0, 1.0, 1.0]);
    let via_qr = pinv_surjective(&wide).unwrap();
    let via_svd = pinv(&decompose(&wide, DEFAULT_RANK_TOL_FACTOR).unwrap());
    println!("surjective: QR and SVD differ by {:.1e}", (via_qr - via_svd).norm());

    // A rank-preserving perturbation meets the lemma's premise; a generic one raises the rank.
    for (label, b) in [("scaled", &a * 1.05), ("generic", &a + Matrix::from_element(3, 4, 0.01))] {
        let check = perturbation_bound_check(&a, &b).unwrap();
        println!("{label} perturbation: premise met {}, violated {}", check.premise_met(), check.violated());
    }

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let low = random_matrix_of_rank(&mut rng, 6, 5, 2);
    println!("random 6x5 of rank 2 -> numerical rank {}", decompose(&low, DEFAULT_RANK_TOL_FACTOR).unwrap().rank());

    let audit = linalg_audit(1000, 0, 8).unwrap();
    println!("audit of 1000 random matrices passed: {}", audit.passed());
}
