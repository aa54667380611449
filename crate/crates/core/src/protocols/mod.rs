//! The experiments: conversion oscillation, avoided crossing, adiabatic
//! parity readout and displaced-parity Wigner tomography, with an imperfect
//! phonon-mapping channel and finite-shot sampling.

pub mod calibration;
pub mod crossing;
pub mod fit;
pub mod measurement;
pub mod oscillation;
pub mod parity;
pub mod wigner_scan;
