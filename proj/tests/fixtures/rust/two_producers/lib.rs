pub struct Ty1(pub u8);
pub struct Holder<T>(pub Ty1, pub T);

pub fn make_a() -> Ty1 {
    Ty1(0)
}

pub fn make_b(x: u8) -> Ty1 {
    Ty1(x)
}

pub fn pair_with<T>(a: Ty1, t: T) -> Holder<T> {
    Holder(a, t)
}
