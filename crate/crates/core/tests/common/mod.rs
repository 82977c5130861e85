#![allow(dead_code)]

use hdsparse::experiment::{gaussian_dictionary, gen_problem, CoeffDist, SampleRng};
use hdsparse::nalgebra::{DMatrix, DVector};
use hdsparse::{lift, lift_instance, LiftedInstance, LiftedSystem, Problem};

pub struct Case {
    pub prob: Problem,
    pub truth: DVector<f64>,
    pub sys: LiftedSystem,
    pub inst: LiftedInstance,
}

pub fn planted(n: usize, l: usize, kappa: usize, seed: u64) -> Case {
    let (prob, truth) = gen_problem(n, l, kappa, seed, CoeffDist::Normal).unwrap();
    let sys = lift(prob.q()).unwrap();
    let inst = lift_instance(&sys, prob.x()).unwrap();
    Case { prob, truth, sys, inst }
}

pub fn dictionary(n: usize, l: usize, seed: u64) -> DMatrix<f64> {
    gaussian_dictionary(&mut SampleRng::new(seed), n, l)
}

pub fn normal_vector(len: usize, rng: &mut SampleRng) -> DVector<f64> {
    DVector::from_iterator(len, std::iter::repeat_with(|| rng.normal()).take(len))
}

pub fn support_of(v: &DVector<f64>) -> Vec<usize> {
    (0..v.len()).filter(|&i| v[i] != 0.0).collect()
}
