# fairspread/urls.py
from django.contrib import admin
from django.urls import path

urlpatterns = [
    # Run history browser
    path('admin/', admin.site.urls),
]
