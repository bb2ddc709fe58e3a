pub struct Ty1;
pub struct Ty2;

pub fn f1() -> Ty1 {
    Ty1
}

pub fn f2() -> Ty2 {
    Ty2
}

pub fn f3<T>(_t: T) {}

pub fn f4<T>(t: T) -> Vec<T> {
    vec![t]
}
