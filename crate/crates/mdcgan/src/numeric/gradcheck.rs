//! Central-difference verification of the backward pass.

use super::{Matrix, Network, NumericError, Rng};

const FD_EPSILON: f64 = 1e-5;

/// Compares analytic parameter gradients against central finite
/// differences of `loss(net(probe))` and returns the worst relative
/// error. `loss_grad` must be the exact gradient of `loss` with respect
/// to the network output.
///
/// Dropout must be disabled (eval mode or rate zero) so the probed
/// function is deterministic; batch norm runs in whatever mode the
/// network is currently in.
pub fn grad_check<L, G>(
    net: &mut Network,
    loss: L,
    loss_grad: G,
    probe: &Matrix,
    rng: &mut Rng,
) -> Result<f64, NumericError>
where
    L: Fn(&Matrix) -> f64,
    G: Fn(&Matrix) -> Matrix,
{
    if net.has_active_dropout() {
        return Err(NumericError::DropoutActive);
    }

    let out = net.forward(probe, rng)?;
    let upstream = loss_grad(&out);
    net.backward(&upstream)?;
    let analytic: Vec<Matrix> = net
        .param_tensors()
        .iter()
        .map(|(_, g)| (*g).clone())
        .collect();

    // Scale-aware denominator: entries far below the dominant gradient
    // magnitude sit under the finite-difference noise floor (e.g. a dense
    // bias feeding batch norm has an exactly-zero gradient), so they are
    // compared against a fraction of the gradient scale instead.
    let grad_scale = analytic
        .iter()
        .flat_map(|g| g.data())
        .fold(0.0_f64, |acc, v| acc.max(v.abs()));

    let mut worst = 0.0_f64;
    let tensor_count = analytic.len();
    for ti in 0..tensor_count {
        let entries = analytic[ti].data().len();
        for ei in 0..entries {
            let original = net.param_tensors()[ti].0.data()[ei];

            net.param_tensors()[ti].0.data_mut()[ei] = original + FD_EPSILON;
            let plus = loss(&net.forward(probe, rng)?);
            net.param_tensors()[ti].0.data_mut()[ei] = original - FD_EPSILON;
            let minus = loss(&net.forward(probe, rng)?);
            net.param_tensors()[ti].0.data_mut()[ei] = original;

            let numeric = (plus - minus) / (2.0 * FD_EPSILON);
            let a = analytic[ti].data()[ei];
            let denom = (a.abs() + numeric.abs()).max(1e-4 * grad_scale + 1e-12);
            let rel = (a - numeric).abs() / denom;
            if rel > worst {
                worst = rel;
            }
        }
    }
    // Leave the caches consistent with the unperturbed parameters.
    net.forward(probe, rng)?;
    net.backward(&upstream)?;
    Ok(worst)
}
