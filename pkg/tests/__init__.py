"""
Test suite for the Musielak-Orlicz fluid laboratory.
"""
