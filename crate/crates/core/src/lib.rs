//! Analytics and forecasting for country-commodity-year trade panels.
//!
//! The pipeline: parse trade flows and bilateral economic covariates from
//! CSV snapshots, inner-join them into a column-oriented [`panel::PanelTable`],
//! then explain and forecast the joined data with correlation analysis and
//! least squares ([`stats`]), country clustering ([`kmeans`]), univariate
//! interval forecasting ([`arima`]), and gradient-boosted regression trees
//! ([`gbdt`]).

pub mod arima;
pub mod gbdt;
pub mod kmeans;
pub mod panel;
pub mod stats;
