//! Plain descriptions of what each task computes and of its checks.

use crate::doc::Task;

pub struct Explanation {
    pub summary: &'static str,
    pub payload: &'static str,
    /// Check name (without prefix) and what its residual measures.
    pub checks: &'static [(&'static str, &'static str)],
    /// Groups of checks reported under a prefix.
    pub groups: &'static [(&'static str, &'static [(&'static str, &'static str)])],
}

const AXIOM_CHECKS: &[(&str, &str)] = &[
    ("commutativity", "∂_a∘∂_b − ∂_b∘∂_a over coordinate fields"),
    ("associativity", "(∂_a∘∂_b)∘∂_c − ∂_a∘(∂_b∘∂_c)"),
    ("unit", "e∘∂_a − ∂_a"),
    (
        "integrability",
        "L_{X∘Y}(∘) − X∘L_Y(∘) − Y∘L_X(∘) on coordinate fields; one order lost to the Lie derivative",
    ),
    ("euler", "L_E(∘) − ∘"),
];

const FRAME_CHECKS: &[(&str, &str)] = &[
    (
        "low_brackets",
        "[X_i, X_j] − (j − i) X_{i+j−1} for the powers X_i = E^i, i + j ≤ n",
    ),
    (
        "unified_brackets",
        "the full bracket table of the powers of E on a single-eigenvalue model",
    ),
    (
        "eigenfunction",
        "X_i(a) − a^i, with a the mean eigenvalue of E∘",
    ),
    (
        "power_reduction",
        "E^{n+s} expressed through lower powers, s = 0, 1, 2",
    ),
];

const GAMMA_CHECKS: &[(&str, &str)] = &[
    (
        "epsilon_symmetry",
        "γ^T ε − ε γ: γ is symmetric for the constant pairing ε",
    ),
    ("psi_norm_constant", "first partials of ε(ψ, ψ)"),
    (
        "psi_derivative_law",
        "∂_i ψ − ψ [C_i, γ], how ψ moves along each coordinate",
    ),
    (
        "gamma_t_law",
        "γ applied to T = ε^{-1}(ψ) against the gradient of ε(ψ, ψ); holds for every invertible ψ",
    ),
    (
        "darboux_egoroff",
        "largest residual of the generalized Darboux–Egoroff system for γ",
    ),
    (
        "coidentity_closedness",
        "d of the coidentity e♭; zero means a potential exists",
    ),
    (
        "unit_derivative",
        "e(η) on every component: the coidentity is constant along the unit",
    ),
    (
        "euler_rescaling",
        "E(η) − (D − 2) η for the fixed or fitted D",
    ),
];

const FIBRE_CHECKS: &[(&str, &str)] = &[
    ("nabla_g", "covariant derivative of the fibre metric g_V"),
    ("rinf_skew", "R_∞ + R_∞*, adjoint taken with respect to g_V"),
    ("r0_symmetric", "R_0 − R_0*"),
    ("phi_symmetric", "Φ_i − Φ_i*"),
];

const ISO_CHECKS: &[(&str, &str)] = &[
    (
        "frame_transport",
        "ψ_* X_i − Y_i∘ψ for the frames of powers of E",
    ),
    ("unit_transport", "ψ_* e_A − e_B∘ψ"),
    ("euler_transport", "ψ_* E_A − E_B∘ψ"),
    ("multiplicativity", "ψ_*(∂_a∘∂_b) − ψ_*∂_a ∘ ψ_*∂_b"),
    (
        "euler_power_transport",
        "ψ_*(E^i) − E^i∘ψ for all powers up to the order",
    ),
    (
        "jacobian_closedness",
        "failure of the degree-by-degree Jacobian corrections to integrate",
    ),
];

const BUNDLE_CHECKS: &[(&str, &str)] = &[
    ("connection_curvature", "curvature of the flat connection ∇"),
    ("phi_wedge_phi", "[Φ_i, Φ_j]"),
    ("r0_phi_commute", "[R_0, Φ_i]"),
    ("d_nabla_phi", "∇_iΦ_j − ∇_jΦ_i"),
    ("nabla_r0", "∇_i R_0 + Φ_i − [Φ_i, R_∞]"),
    ("nabla_rinf", "∇_i R_∞"),
];

const INDUCED_CHECKS: &[(&str, &str)] = &[
    (
        "euler_operator",
        "E∘ on the base against −R_0 carried over by the section",
    ),
    (
        "char_poly_distance",
        "characteristic polynomials of E∘ and −R_0 at the origin",
    ),
    (
        "commutativity",
        "F-manifold axioms of the induced multiplication, as in verify-fmanifold",
    ),
    ("associativity", "as in verify-fmanifold"),
    ("unit", "as in verify-fmanifold"),
    ("integrability", "as in verify-fmanifold"),
    ("euler", "as in verify-fmanifold"),
];

const INDUCED_METRIC_CHECKS: &[(&str, &str)] = &[
    ("section_flatness", "∇s for the chosen section"),
    (
        "euler_derivative",
        "∇E − R_∞ − (1 − q) Id through the Levi-Civita connection of the induced metric",
    ),
    ("metric_invariance", "g(X∘Y, Z) − g(X, Y∘Z)"),
    ("riemann", "Levi-Civita curvature of the induced metric"),
    ("unit_parallel", "∇e for the induced metric"),
];

const BIRKHOFF_CHECKS: &[(&str, &str)] = &[
    ("c_commute", "[C_i, C_j], the τ^{-2} part of dx^i∧dx^j"),
    ("c_closed", "∂_iC_j − ∂_jC_i, the τ^{-1} part of dx^i∧dx^j"),
    ("b0_commute", "[B_0, C_i], the τ^{-3} part of dτ∧dx^i"),
    (
        "b0_derivative",
        "−∂_iB_0 − C_i + [B_∞, C_i], the τ^{-2} part of dτ∧dx^i",
    ),
    (
        "other_powers",
        "every remaining power of τ, which vanishes identically",
    ),
];

const INTEGRALITY_CHECKS: &[(&str, &str)] = &[
    ("gamma_at_origin", "Γ(0)"),
    (
        "tangency",
        "∂_iΓ written as a polynomial in B_0(Γ) of degree below n",
    ),
    ("closure", "products ∂_iΓ ∂_jΓ written the same way"),
];

const CHART_CHECKS: &[(&str, &str)] = &[
    (
        "tangent_reexpansion",
        "∂_iΓ ∂_jΓ − Σ_k c_ij^k ∂_kΓ for the multiplication read off the chart",
    ),
    (
        "origin_spectrum_distance",
        "spectrum of E∘ at the origin against that of −B_0^o",
    ),
];

const VALIDATION_CHECKS: &[(&str, &str)] = &[
    ("gp_symmetric", "g_p − g_p^T"),
    ("invariance", "g_p(X∘Y, Z) − g_p(X, Y∘Z) at the origin"),
    ("vp_skewness", "V_p is skew for g_p"),
    ("vp_unit_eigenvalue", "V_p(e) − (1 − D/2) e"),
    (
        "companion_shape",
        "E∘ maps each power E^i to E^{i+1} at the origin",
    ),
];

const EXTEND_CHECKS: &[(&str, &str)] = &[
    (
        "origin_match",
        "the extended metric at the origin against g_p",
    ),
    ("euler_derivative_at_origin", "(∇E)(0) − V_p − (D/2) Id"),
    ("euler_rescaling", "L_E g − D g"),
    ("metric_invariance", "g(X∘Y, Z) − g(X, Y∘Z) on the model"),
    ("riemann", "Levi-Civita curvature of the extended metric"),
    ("unit_parallel", "∇e for the extended metric"),
    (
        "b0o_g0_symmetric",
        "g_0 B_0^o − (B_0^o)^T g_0 for the fibre metric g_0",
    ),
    ("binf_g0_skew", "g_0 B_∞ + B_∞^T g_0"),
    ("chart_g0_symmetric", "g_0 Γ − Γ^T g_0 along the chart"),
    (
        "block_form",
        "the Gram matrix against the block form built from its coidentity",
    ),
    (
        "probe_order_uniqueness",
        "difference of the metrics built with two cyclic-vector choices",
    ),
];

pub fn explain(task: Task) -> Explanation {
    match task {
        Task::VerifyFmanifold => Explanation {
            summary: "Checks the F-manifold axioms and the bracket relations of the powers of the Euler field on a model given by a Jordan spectrum or by explicit structure jets.",
            payload: "{\"model\": {\"spectrum\": [{\"re\", \"im\", \"size\"}]} or {\"structure\", \"unit\", \"euler\"}}",
            checks: &[],
            groups: &[("axioms", AXIOM_CHECKS), ("frame", FRAME_CHECKS)],
        },
        Task::StandardModel => Explanation {
            summary: "Builds the standard regular F-manifold of a Jordan spectrum, verifies it and emits its structure jets.",
            payload: "{\"spectrum\": [{\"re\", \"im\", \"size\"}]}",
            checks: &[],
            groups: &[("axioms", AXIOM_CHECKS), ("frame", FRAME_CHECKS)],
        },
        Task::VerifyFrobenius => Explanation {
            summary: "Decides whether an invariant metric on a product of standard blocks is flat with flat unit, through the one-form ψ = √η, its inverse β, the operator γ and the Darboux–Egoroff system. The Levi-Civita curvature is reported alongside as an independent check.",
            payload: "{\"blocks\": [m, ...], \"eta\": [[jet, ...], ...] or \"potential\": jet, \"eigenvalues\"?: [[re, im], ...], \"euler\"?: \"skip\" | \"solve\" | {\"fixed\": [re, im]}}",
            checks: GAMMA_CHECKS,
            groups: &[],
        },
        Task::Symmetries => Explanation {
            summary: "Checks that the vector fields Y_1, …, Y_{m−1} preserve the multiplication and the Euler field of a standard block, and that they close under the bracket.",
            payload: "{\"m\": size, \"eigenvalue\"?: [re, im]}",
            checks: &[(
                "bracket_i_j",
                "[Y_i, Y_j] − (i − j) Y_{i+j−1}, or [Y_i, Y_j] when i + j > m",
            )],
            groups: &[(
                "yk",
                &[
                    ("lie_multiplication", "L_Y(∘) on all pairs of coordinate fields, Y = Y_k"),
                    ("euler_bracket", "[Y, E]"),
                    ("unit_bracket", "[∂_0, Y]"),
                    ("top_product", "[∂_1, Y]∘∂_{m−1}"),
                    ("shift_relation", "[∂_i, Y] − i ∂_{i−1}∘[∂_1, Y]"),
                ],
            )],
        },
        Task::SaitoCheck => Explanation {
            summary: "Checks the compatibility conditions of a flat bundle with Higgs field Φ and endomorphisms R_0, R_∞, optionally with a fibre metric, and the F-manifold (and metric) induced by a constant section.",
            payload: "{\"phi\": [jet matrix, ...], \"r0\": jet matrix, \"rinf\": matrix, \"gv\"?: matrix, \"section\"?: vector, \"q\"?: [re, im]}",
            checks: &[],
            groups: &[
                ("axioms", BUNDLE_CHECKS),
                ("metric", FIBRE_CHECKS),
                ("fmanifold", INDUCED_CHECKS),
                ("frobenius", INDUCED_METRIC_CHECKS),
            ],
        },
        Task::BirkhoffFlatness => Explanation {
            summary: "Expands the curvature of the connection with poles of order two at zero and one at infinity in powers of τ and reports every coefficient.",
            payload: "{\"b0\": jet matrix, \"binf\": matrix, \"c\": [jet matrix, ...]}",
            checks: BIRKHOFF_CHECKS,
            groups: &[],
        },
        Task::MalgrangeChart => Explanation {
            summary: "Integrates the universal isomonodromic deformation of a regular residue B_0^o as a matrix germ Γ(u), checks that the leaf is integral, that its connection is flat, and that the F-manifold it carries is isomorphic to the standard model of −B_0^o.",
            payload: "{\"b0o\": matrix, \"binf\": matrix, \"flows\"?: \"ascending\" | \"descending\"}",
            checks: CHART_CHECKS,
            groups: &[
                ("integrality", INTEGRALITY_CHECKS),
                ("flatness", BIRKHOFF_CHECKS),
                ("axioms", AXIOM_CHECKS),
                ("iso", ISO_CHECKS),
            ],
        },
        Task::ExtendMetric => Explanation {
            summary: "Extends a metric given at the origin, together with the derivative of the Euler field there, to a homogeneous Frobenius metric, and checks the result against the data and against every metric identity. The report also carries the verdict on the extended metric, the fibre-metric checks and the transport checks for the map from the model to the chart.",
            payload: "{\"model\": model, \"gp\": matrix, \"vp\": matrix, \"d\": [re, im]}",
            checks: EXTEND_CHECKS,
            groups: &[
                ("validation", VALIDATION_CHECKS),
                ("verdict", GAMMA_CHECKS),
                ("fibre", FIBRE_CHECKS),
                ("iso", ISO_CHECKS),
            ],
        },
        Task::GermIso => Explanation {
            summary: "Constructs a germ isomorphism between two regular F-manifolds degree by degree, or reports that none exists.",
            payload: "{\"source\": model, \"target\": model}",
            checks: ISO_CHECKS,
            groups: &[],
        },
    }
}

pub fn render(task: Task) -> String {
    let e = explain(task);
    let mut s = format!("{task}\n\n{}\n\npayload: {}\n", e.summary, e.payload);
    if !e.checks.is_empty() {
        s.push_str("\nchecks:\n");
    }
    let width = e
        .checks
        .iter()
        .chain(e.groups.iter().flat_map(|(_, g)| g.iter()))
        .map(|(n, _)| n.len())
        .max()
        .unwrap_or(0);
    for (name, what) in e.checks {
        s.push_str(&format!("  {name:<width$}  {what}\n"));
    }
    for (prefix, group) in e.groups {
        s.push_str(&format!("\nchecks prefixed {prefix}.:\n"));
        for (name, what) in *group {
            s.push_str(&format!("  {name:<width$}  {what}\n"));
        }
    }
    s
}
