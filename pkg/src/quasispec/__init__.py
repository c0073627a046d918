"""Asymptotic Steklov spectra of curvilinear polygons from side lengths and angles."""
