//! Every example must run to completion.

mod alloy_moments {
    include!("../examples/alloy_moments.rs");
}

mod blowup_probe {
    include!("../examples/blowup_probe.rs");
}

mod coupling_specs {
    include!("../examples/coupling_specs.rs");
}

mod duhamel_error {
    include!("../examples/duhamel_error.rs");
}

mod helmholtz_product_identity {
    include!("../examples/helmholtz_product_identity.rs");
}

mod homogenization_sweep {
    include!("../examples/homogenization_sweep.rs");
}

mod littlewood_paley {
    include!("../examples/littlewood_paley.rs");
}

mod periodic_decay {
    include!("../examples/periodic_decay.rs");
}

mod plane_wave_resonance {
    include!("../examples/plane_wave_resonance.rs");
}

mod scaling_symmetry {
    include!("../examples/scaling_symmetry.rs");
}

mod strang_convergence {
    include!("../examples/strang_convergence.rs");
}

mod strichartz_norms {
    include!("../examples/strichartz_norms.rs");
}

#[test]
fn examples_run() {
    alloy_moments::run_example().unwrap();
    blowup_probe::run_example().unwrap();
    coupling_specs::run_example().unwrap();
    duhamel_error::run_example().unwrap();
    helmholtz_product_identity::run_example().unwrap();
    homogenization_sweep::run_example().unwrap();
    littlewood_paley::run_example().unwrap();
    periodic_decay::run_example().unwrap();
    plane_wave_resonance::run_example().unwrap();
    scaling_symmetry::run_example().unwrap();
    strang_convergence::run_example().unwrap();
    strichartz_norms::run_example().unwrap();
}
