# Two-way deterministic interference channel lab
