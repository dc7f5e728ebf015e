"""Closed-form estimates, Stampacchia level sets and barrier constructions."""
