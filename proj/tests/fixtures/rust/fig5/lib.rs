pub struct Pair<T, U>(pub T, pub U);

pub fn foo<T, U>(_v: Vec<T>, _b: Box<U>, _p: Pair<T, U>) {}

pub fn mk_vec_u8() -> Vec<u8> {
    vec![1, 2, 3]
}

pub fn mk_vec_f32() -> Vec<f32> {
    vec![0.5]
}

pub fn mk_box_i32() -> Box<i32> {
    Box::new(7)
}

pub fn mk_box_u8() -> Box<u8> {
    Box::new(7)
}

pub fn mk_pair() -> Pair<u8, i32> {
    Pair(1, 2)
}

pub fn mk_pair2() -> Pair<i64, i32> {
    Pair(1, 2)
}
