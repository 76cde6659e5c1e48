//! Malgrange universal deformations: charts of the integral leaf through 0
//! built by composing flows, the F-manifold they carry, and the extension of
//! pointwise metric data at a point to a Frobenius metric.

mod chart;
mod initial;

pub use chart::{
    b0_at, canonical_connection, check_integrality, check_tangency, check_universality_isomorphism,
    fmanifold_on_chart, fmanifold_on_chart_with, integrate_chart, integrate_chart_with, ChartModel,
    DeformationSpec, FlowOrder, IntegralityReport, MalgrangeChart, UniversalityCheck,
    FRAME_RCOND_MIN,
};
pub use initial::{
    initial_condition_extend, initial_condition_extend_with, lie_derivative, uniqueness_probe,
    validate_initial_data, ExtendSettings, ExtensionReport, InitialData, InitialDataReport,
    MetricExtension, METRIC_RCOND_MIN, ORDER_MARGIN, SIGN_CONVENTION,
};
