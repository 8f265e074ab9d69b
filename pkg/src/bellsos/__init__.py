"""bellsos: symmetry-reduced moment relaxations and exact SOS certificates
for Bell inequality polynomial optimization."""

__version__ = "0.1.0"
