pub mod cyclotomic;
pub mod matrix;
pub mod poly;
pub mod roots;
pub mod elimination;
pub mod fusion_ring;
pub mod associator;
pub mod reference;
pub mod pentagon_solver;
pub mod rigidity_dual;
pub mod pivotal;
pub mod braiding;
pub mod io;
