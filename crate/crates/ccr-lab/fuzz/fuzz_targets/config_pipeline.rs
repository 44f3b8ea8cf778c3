#![no_main]

use ccr_lab::config::RunConfig;
use ccr_lab::wightman::WightmanFunctional;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(config) = serde_json::from_str::<RunConfig>(text) else {
        return;
    };
    if config.check().is_err() {
        return;
    }
    // Clamp the sizes so each iteration stays cheap; the numeric kernels are
    // exercised on whatever (possibly degenerate) matrices the input encodes.
    if config.dim > 6 || config.truncation > 3 {
        return;
    }
    let Ok(space) = config.to_space() else {
        return;
    };
    let _ = space.validate();
    let _ = space.hermitian_basis();
    if let Ok(functional) = WightmanFunctional::new(&space, 2 * config.truncation) {
        let _ = functional.gram(config.truncation);
    }
});
