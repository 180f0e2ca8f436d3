"""Watch time-averaged squared window observations reach their limits.

The time average J_t of <X(t), z>^2 converges almost surely to the
stationary quadratic form: (1/(4ab)) sum lambda_k z1_k^2 +
(1/(4a)) sum lambda_k z2_k^2.  This is the ergodic fact every estimator in
the package is built on.
"""

from dampedwave import (
    ComponentAccumulators,
    InitialCondition,
    ModelParams,
    SimPlan,
    SnapshotRecorder,
    SpectralConfig,
    Window,
    dirichlet_eigenvalues,
    inverse_square_lambdas,
    q_infinity_quadratic_form,
    simulate,
)

params = ModelParams(a=1.0, b=0.2)
cfg = SpectralConfig(10, dirichlet_eigenvalues(10), inverse_square_lambdas(10))
x0 = InitialCondition.constant(10)

windows = {
    "velocity coordinate (0, e_1)": Window.velocity_mode(1, 10),
    "position coordinate (f_1, 0)": Window.position_mode(1, 10),
    "mixed combination": Window([0.5] * 10, [0.5] * 10),
}

plan = SimPlan(params, cfg, x0, t_horizon=500.0, dt=1e-3, scheme="exact", seed=11)
recorders = {
    name: SnapshotRecorder(ComponentAccumulators(w, cfg), stride=50_000)
    for name, w in windows.items()
}
simulate(plan, list(recorders.values()))

for name, rec in recorders.items():
    rec.record_final(plan.dt)
    limit = q_infinity_quadratic_form(params, cfg, windows[name])
    print(f"\n{name}: stationary limit {limit:.2f}")
    for snap in rec.snapshots:
        rel = (snap.full - limit) / limit
        print(f"  t = {snap.t:6.0f}:  J_t = {snap.full:9.2f}  ({rel:+.1%})")
