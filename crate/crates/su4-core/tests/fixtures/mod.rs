//! Printed reference matrices and parameter rows (three decimals).
#![allow(dead_code)]

use su4_core::gates::CircuitParams;
use su4_core::linalg::Mat4;
use su4_core::C64;

type Row = [(f64, f64); 4];

fn mat(rows: [Row; 4]) -> Mat4 {
    Mat4::from_fn(|i, j| C64::new(rows[i][j].0, rows[i][j].1))
}

pub fn u_reference() -> Mat4 {
    mat([
        [(-0.342, 0.260), (-0.042, -0.531), (-0.690, 0.125), (0.196, -0.034)],
        [(0.195, 0.743), (-0.138, 0.090), (-0.064, -0.520), (-0.304, 0.127)],
        [(-0.416, 0.007), (-0.244, 0.786), (-0.332, 0.012), (0.179, 0.090)],
        [(0.074, 0.217), (-0.084, -0.076), (0.320, -0.145), (0.871, 0.229)],
    ])
}

pub fn u_a() -> Mat4 {
    mat([
        [(-0.362, -0.428), (-0.501, -0.125), (0.054, 0.083), (-0.464, -0.440)],
        [(0.396, 0.534), (-0.651, -0.325), (-0.112, -0.083), (-0.088, 0.051)],
        [(-0.255, 0.350), (-0.224, 0.310), (0.320, 0.328), (0.529, -0.421)],
        [(-0.002, 0.238), (0.204, 0.130), (-0.744, 0.456), (-0.208, -0.285)],
    ])
}

pub fn u_b() -> Mat4 {
    mat([
        [(0.138, 0.564), (-0.385, -0.300), (-0.055, 0.217), (-0.611, 0.004)],
        [(-0.196, 0.035), (-0.256, -0.388), (-0.576, -0.027), (0.386, 0.512)],
        [(-0.054, -0.147), (-0.146, -0.622), (0.706, 0.113), (0.226, 0.075)],
        [(-0.152, 0.758), (0.324, 0.180), (0.277, -0.171), (0.289, 0.273)],
    ])
}

pub fn u_c() -> Mat4 {
    mat([
        [(-0.645, 0.445), (-0.154, 0.006), (-0.174, 0.561), (0.127, 0.037)],
        [(-0.528, 0.217), (-0.145, -0.151), (0.404, -0.676), (-0.050, -0.092)],
        [(0.012, 0.136), (0.534, -0.495), (-0.183, -0.016), (0.250, -0.596)],
        [(-0.079, 0.187), (0.602, -0.201), (0.037, 0.031), (-0.545, 0.507)],
    ])
}

pub fn u_d() -> Mat4 {
    mat([
        [(-0.162, 0.425), (-0.043, 0.148), (0.427, 0.024), (0.031, -0.765)],
        [(0.091, -0.304), (-0.614, -0.158), (-0.372, -0.433), (0.104, -0.401)],
        [(0.256, -0.229), (0.105, 0.743), (0.209, -0.369), (0.365, 0.076)],
        [(-0.607, 0.454), (-0.079, 0.072), (-0.116, -0.546), (0.035, 0.319)],
    ])
}

pub const ROW_1A: [f64; 15] =
    [5.058, 1.477, 6.144, 4.165, 4.759, 1.151, 4.327, 5.678, 2.088, 0.856, 5.210, 3.046, 2.526, 4.528, 1.570];
pub const ROW_1B: [f64; 15] =
    [1.917, 3.280, 1.665, 1.254, 2.987, 2.716, 5.098, 2.537, 0.693, 5.438, 1.068, 0.213, 5.327, 0.062, 2.838];
pub const ROW_3A: [f64; 15] =
    [2.286, 0.840, 6.094, 1.648, 1.402, 2.443, 1.277, 2.627, 2.930, 5.305, 2.593, 3.873, 4.501, 2.938, 3.643];
pub const ROW_3B: [f64; 15] =
    [6.196, 1.439, 1.119, 2.542, 3.079, 4.151, 1.982, 1.744, 6.140, 0.833, 2.349, 1.947, 3.742, 0.011, 1.487];
pub const ROW_3C: [f64; 15] =
    [1.589, 5.129, 1.721, 1.721, 1.714, 3.344, 4.911, 0.249, 1.107, 0.470, 0.918, 0.339, 1.632, 0.545, 1.607];
pub const ROW_3D: [f64; 15] =
    [0.389, 0.750, 1.392, 5.423, 1.300, 6.004, 4.824, 1.961, 3.199, 4.351, 1.100, 1.501, 2.352, 2.022, 1.426];

pub const MINUS_ONE: C64 = C64::new(-1.0, 0.0);
pub const PLUS_I: C64 = C64::new(0.0, 1.0);
pub const MINUS_I: C64 = C64::new(0.0, -1.0);

/// The two parameter rows printed for the first reference matrix.
pub fn reference_rows() -> [(CircuitParams, Mat4); 2] {
    [
        (CircuitParams::from_row(&ROW_1A, MINUS_ONE), u_reference()),
        (CircuitParams::from_row(&ROW_1B, MINUS_I), u_reference()),
    ]
}

/// Rows a-d with their printed global phases and target matrices.
pub fn four_operation_rows() -> [(char, CircuitParams, Mat4); 4] {
    [
        ('a', CircuitParams::from_row(&ROW_3A, PLUS_I), u_a()),
        ('b', CircuitParams::from_row(&ROW_3B, MINUS_I), u_b()),
        ('c', CircuitParams::from_row(&ROW_3C, PLUS_I), u_c()),
        ('d', CircuitParams::from_row(&ROW_3D, MINUS_I), u_d()),
    ]
}
