"""
Services package for resilient network clock synchronization.
"""
