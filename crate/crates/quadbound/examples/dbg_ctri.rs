use quadbound::cellmesh::*;
use quadbound::geom::*;
use num_complex::Complex64 as Complex;
fn main() {
    let tri = canonical_ctri();
    let it = inner_triangle(0.35).unwrap();
    let e_left = Carrier::Circle(tri.left);
    let c_l = Carrier::Circle(it.c_left);
    let p_lstar = orthogonal_pencil(&c_l, &e_left).unwrap();
    println!("p_lstar = {:?}", p_lstar);
    // U-leaf through a ray point vs through v_top: check perpendicular feet
    let conn_v = p_lstar.member_through(it.v_top).unwrap();
    println!("conn_v = {:?}", conn_v);
    let hits = intersect(&conn_v, &e_left);
    println!("conn_v x e_left = {:?}", hits);
    let hits2 = intersect(&conn_v, &c_l);
    println!("conn_v x c_l = {:?}", hits2);
}
