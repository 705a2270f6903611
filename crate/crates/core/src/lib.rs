pub mod canon;
pub mod catalog;
pub mod digraph;
pub mod gadgets;
pub mod poly;
pub mod reductions;
pub mod selfcheck;
pub mod solver;
pub mod twosat;
