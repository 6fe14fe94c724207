use std::fmt;

/// An assignment of values to named base variables.
#[derive(Clone, Default, PartialEq)]
pub struct Point {
    entries: Vec<(String, f64)>,
}

impl Point {
    pub fn new() -> Self {
        Point::default()
    }

    pub fn from_pairs<'a, I: IntoIterator<Item = (&'a str, f64)>>(pairs: I) -> Self {
        let mut p = Point::new();
        for (k, v) in pairs {
            p.set(k, v);
        }
        p
    }

    pub fn set(&mut self, name: &str, value: f64) {
        match self.entries.iter_mut().find(|(k, _)| k == name) {
            Some(e) => e.1 = value,
            None => self.entries.push((name.to_string(), value)),
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (k, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        write!(f, "}}")
    }
}
