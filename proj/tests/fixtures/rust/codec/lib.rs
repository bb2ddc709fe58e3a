pub trait Encode {
    fn enc(&self) -> u32;
}

impl Encode for u8 {
    fn enc(&self) -> u32 {
        *self as u32
    }
}

impl Encode for i32 {
    fn enc(&self) -> u32 {
        *self as u32
    }
}

pub struct Ty1(pub u8);

impl Ty1 {
    pub fn new(x: u8) -> Ty1 {
        Ty1(x)
    }

    pub fn bump(&mut self, by: u8) {
        self.0 = self.0.wrapping_add(by);
    }
}

impl Encode for Ty1 {
    fn enc(&self) -> u32 {
        self.0 as u32 * 3
    }
}

impl<T: Encode> Encode for Vec<T> {
    fn enc(&self) -> u32 {
        self.iter().fold(0u32, |acc, x| acc.wrapping_mul(31).wrapping_add(x.enc()))
    }
}

pub fn try_ty1(x: i32) -> Option<Ty1> {
    u8::try_from(x).ok().map(Ty1)
}

pub fn parse_ty1(s: &str) -> Result<Ty1, u8> {
    s.parse::<u8>().map(Ty1).map_err(|_| 0)
}

pub fn encode<T: Encode>(v: &T) -> u32 {
    v.enc()
}

pub fn wrap<T: Encode>(v: T) -> Vec<T> {
    vec![v]
}

pub struct Key(pub u32);

impl Encode for Key {
    fn enc(&self) -> u32 {
        self.0
    }
}

pub fn parse_key(s: &str) -> Result<Key, u8> {
    s.parse::<u32>().map(Key).map_err(|_| 1)
}

pub fn find_key(x: i32) -> Option<Key> {
    if x > 0 { Some(Key(x as u32)) } else { None }
}

pub fn touch<T: Encode>(t: &mut T, by: u8) -> u32 {
    t.enc().wrapping_add(by as u32)
}
