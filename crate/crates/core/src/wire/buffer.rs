use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum WireError {
    #[error("buffer full")]
    BufferFull,
    #[error("read past end of buffer")]
    Underrun,
    #[error("value {value:#x} does not fit in {bits} bits")]
    ValueTooWide { value: u64, bits: u32 },
    #[error("unknown message kind {0:#04x}")]
    UnknownKind(u8),
    #[error("malformed message: {0}")]
    Malformed(&'static str),
}

/// Width of an unsigned integer on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Width {
    U8,
    U16,
    U32,
    U64,
}

impl Width {
    pub const ALL: [Width; 4] = [Width::U8, Width::U16, Width::U32, Width::U64];

    pub const fn bytes(self) -> usize {
        match self {
            Width::U8 => 1,
            Width::U16 => 2,
            Width::U32 => 4,
            Width::U64 => 8,
        }
    }

    pub const fn bits(self) -> u32 {
        self.bytes() as u32 * 8
    }

    pub const fn max_value(self) -> u64 {
        match self {
            Width::U64 => u64::MAX,
            w => (1u64 << w.bits()) - 1,
        }
    }
}

/// Appends to a caller-provided byte buffer.
#[derive(Debug)]
pub struct Writer<'a> {
    buf: &'a mut [u8],
    pos: usize,
}

impl<'a> Writer<'a> {
    pub fn new(buf: &'a mut [u8]) -> Self {
        Writer { buf, pos: 0 }
    }

    /// Starts writing at `offset` instead of the beginning of `buf`.
    pub fn at(buf: &'a mut [u8], offset: usize) -> Self {
        assert!(offset <= buf.len(), "offset past end of buffer");
        Writer { buf, pos: offset }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub fn write_uint(&mut self, width: Width, value: u64) -> Result<(), WireError> {
        if value > width.max_value() {
            return Err(WireError::ValueTooWide {
                value,
                bits: width.bits(),
            });
        }
        let n = width.bytes();
        if self.remaining() < n {
            return Err(WireError::BufferFull);
        }
        for i in 0..n {
            let shift = 8 * (n - 1 - i);
            self.buf[self.pos + i] = (value >> shift) as u8;
        }
        self.pos += n;
        Ok(())
    }

    pub fn write_u8(&mut self, value: u8) -> Result<(), WireError> {
        self.write_uint(Width::U8, value.into())
    }

    pub fn write_u16(&mut self, value: u16) -> Result<(), WireError> {
        self.write_uint(Width::U16, value.into())
    }

    pub fn write_u32(&mut self, value: u32) -> Result<(), WireError> {
        self.write_uint(Width::U32, value.into())
    }

    pub fn write_u64(&mut self, value: u64) -> Result<(), WireError> {
        self.write_uint(Width::U64, value)
    }

    pub fn write_bytes(&mut self, bytes: &[u8]) -> Result<(), WireError> {
        if self.remaining() < bytes.len() {
            return Err(WireError::BufferFull);
        }
        self.buf[self.pos..self.pos + bytes.len()].copy_from_slice(bytes);
        self.pos += bytes.len();
        Ok(())
    }
}

/// Consumes a byte slice front to back.
#[derive(Debug, Clone)]
pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    pub fn at(buf: &'a [u8], offset: usize) -> Self {
        assert!(offset <= buf.len(), "offset past end of buffer");
        Reader { buf, pos: offset }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub fn is_empty(&self) -> bool {
        self.remaining() == 0
    }

    pub fn read_uint(&mut self, width: Width) -> Result<u64, WireError> {
        let n = width.bytes();
        if self.remaining() < n {
            return Err(WireError::Underrun);
        }
        let value = self.buf[self.pos..self.pos + n]
            .iter()
            .fold(0u64, |acc, &b| (acc << 8) | u64::from(b));
        self.pos += n;
        Ok(value)
    }

    pub fn read_u8(&mut self) -> Result<u8, WireError> {
        self.read_uint(Width::U8).map(|v| v as u8)
    }

    pub fn read_u16(&mut self) -> Result<u16, WireError> {
        self.read_uint(Width::U16).map(|v| v as u16)
    }

    pub fn read_u32(&mut self) -> Result<u32, WireError> {
        self.read_uint(Width::U32).map(|v| v as u32)
    }

    pub fn read_u64(&mut self) -> Result<u64, WireError> {
        self.read_uint(Width::U64)
    }

    pub fn read_bytes(&mut self, n: usize) -> Result<&'a [u8], WireError> {
        if self.remaining() < n {
            return Err(WireError::Underrun);
        }
        let bytes = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(bytes)
    }

    /// Everything not yet consumed.
    pub fn rest(&mut self) -> &'a [u8] {
        let bytes = &self.buf[self.pos..];
        self.pos = self.buf.len();
        bytes
    }
}
