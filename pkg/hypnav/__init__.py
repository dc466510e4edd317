__author__ = 'hypnav'
