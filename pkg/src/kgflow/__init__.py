"""kgflow: a laboratory for 1D cubic quasi-linear Klein-Gordon equations.

Submodules:

* ``halfalg`` — exact algebra of x-polynomials with half powers of 1-x^2
* ``nonlinearity`` — cubic nonlinearities, null condition, phase coefficients
* ``spectral`` — periodic grid, Fourier multipliers, norms, interpolation
* ``solver`` — Lawson exponential RK4 time stepper and energy diagnostics
* ``semiclassical`` — Weyl quantization, composition expansion, norm probes
* ``profile`` — normal form, limit ODE, modified-scattering fits
* ``cli`` — configuration-driven experiment pipelines
"""

__version__ = "0.1.0"
